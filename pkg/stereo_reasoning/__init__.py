from stereo_reasoning import checkers
from stereo_reasoning import distances
from stereo_reasoning import errors
from stereo_reasoning import formulas
from stereo_reasoning import inference
from stereo_reasoning import representability
from stereo_reasoning import sets
from stereo_reasoning import utils
from stereo_reasoning.checkers import CheckerSettings, CheckReport, check_all
from stereo_reasoning.formulas import models, parse_formula
from stereo_reasoning.inference import best_stereotype, nm_consequences, nm_entails
from stereo_reasoning.knowledge_base import KnowledgeBase, Stereotype, dump_kb, load_kb, load_kb_file, validate_kb
from stereo_reasoning.sets import InfoSet
from stereo_reasoning.worlds import World, WorldSpace

__version__ = "0.1.0"

__all__ = ("CheckReport", "CheckerSettings", "InfoSet", "KnowledgeBase", "Stereotype", "World", "WorldSpace",
           "best_stereotype", "check_all", "checkers", "distances", "dump_kb", "errors", "formulas", "inference",
           "load_kb", "load_kb_file", "models", "nm_consequences", "nm_entails", "parse_formula", "representability",
           "sets", "utils", "validate_kb")

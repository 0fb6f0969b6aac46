"""Interactive layout transfer for vector graphics."""

from .geometry import (
    Delta,
    Design,
    Element,
    ElementGeometry,
    Transformation,
    apply_transformation,
    bounds_relation,
    compose,
    design_diff,
)
from .matching import Correspondence, element_features, match_designs, override_match
from .optimize import RewardBreakdown, WeightConfig, optimize, reward, smoothed_adherence
from .rules import InferenceConfig, LayoutRule, RuleSet, infer_rules, rule_residual, rules_for_selection
from .session import Session, SessionStore, create_session
from .svgio import parse_design, serialize_design
from .transfer import (
    TransferContext,
    conform_offset,
    element_layout_copy,
    enforce_rule,
    global_layout_copy,
    property_copy,
    set_geometry,
)

__version__ = "0.1.0"

"""Reward-penalty-selection games: values, Shapley values and core allocations."""
from .analysis import (
    PropertyCheck,
    embed_three_player,
    four_player_convex_fixture,
    is_convex,
    is_superadditive,
    rpsp_solve,
)
from .core import (
    InCore,
    Orientation,
    Violation,
    core_element,
    flow_from_core,
    is_core,
    payment_from_flow,
    singleton_core,
)
from .errors import *  # noqa: F401,F403
from .flow import (
    CutResult,
    FlowNetwork,
    NodeId,
    build_profit_sharing_graph,
    max_flow,
    min_cut,
    required_flow_value,
)
from .instance import (
    Coalition,
    GameTable,
    PaymentVector,
    RpsInstance,
    char_value,
    game_table,
    grand_value,
    scale_instance,
    subgame,
    validate,
)
from .shapley import shapley_closed_form, shapley_oracle, shapley_table_oracle

__version__ = "0.1.0"

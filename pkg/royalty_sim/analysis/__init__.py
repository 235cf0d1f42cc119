"""Closed-form analyses: collusion feasibility, FMV bound, arbitrage and avoidance cap."""
from royalty_sim.analysis.bounds import (
    BoundsReport,
    arbitrage_profit,
    avoidance_cap,
    bounds_report,
    fmv_lower_bound,
)
from royalty_sim.analysis.collusion import (
    CollusionContract,
    CollusionLimit,
    collusion_feasible,
    collusion_limit,
    collusion_limit_linear,
    find_feasible_collusion,
    lockup_discount,
)

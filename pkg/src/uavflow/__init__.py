"""uavflow: multi-hop UAV multipath-routing simulator and IPPO-DM trainer."""

from .config import RngStreams, SimConfig, desk_scale, load_config, paper_scale
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = [
    "SimConfig",
    "RngStreams",
    "desk_scale",
    "paper_scale",
    "load_config",
    "KERNEL_BACKEND",
    "__version__",
]

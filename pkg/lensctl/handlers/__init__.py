from .bench_handlers import bench, hessian
from .data_handlers import cheb_run, gen_data
from .design_handlers import design, validate_design
from .export_handlers import export_plots
from .run_handlers import al_run, baseline_run, cell_compare

__all__ = [
    "bench",
    "hessian",
    "cheb_run",
    "gen_data",
    "design",
    "validate_design",
    "export_plots",
    "al_run",
    "baseline_run",
    "cell_compare",
]

"""Bottom-up investment gap model for the EU gigabit and 5G targets.

The package estimates, region by region, the capital cost of reaching
four connectivity targets (5G in capitals, 5G in urban areas and along
transport corridors, gigabit for enterprises, gigabit for all premises)
and composes them into one European Gigabit Society total, net of
expected commercial operator investment.

Typical use::

    from gigagap import dataio, gap, targets

    dataset = dataio.load_dataset(dataio.fixture_path())
    report = gap.run_scenario(dataset, targets.SCENARIO_PRESETS["baseline"])
    print(report.totals["egs_premises_companies"])
"""

from .errors import (CostTableError, DataError, DatasetValidationError,
                     GigagapError, InfeasibleCoverageError)

__version__ = "0.1.0"

__all__ = [
    "CostTableError",
    "DataError",
    "DatasetValidationError",
    "GigagapError",
    "InfeasibleCoverageError",
    "__version__",
]

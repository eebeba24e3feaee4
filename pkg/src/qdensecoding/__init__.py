"""Dense coding over a Cooper-pair/cavity entangled channel."""

__version__ = "0.1.0"

from qdensecoding.coding import (  # noqa: E402
    InfoMeasures,
    Kind,
    MessageEnsemble,
    Protocol,
    atom_pauli,
    build_ensemble,
    coded_information_closed,
    coded_state,
    disturbance,
    holevo_quantity,
    info_measures,
)
from qdensecoding.dynamics import (  # noqa: E402
    BasisFrame,
    ChannelAmplitudes,
    Initial,
    SystemParams,
    amplitudes_excited,
    amplitudes_ground,
    channel_state,
    rabi_frequency,
    scaled_detuning,
)
from qdensecoding.errors import ValidationError  # noqa: E402
from qdensecoding.experiments import (  # noqa: E402
    SweepSpec,
    count_local_maxima,
    figure_preset,
    run_sweep,
    trend_check,
)
from qdensecoding.linalg import (  # noqa: E402
    hermitian_eigenvalues,
    shannon_entropy,
    uhlmann_fidelity,
    von_neumann_entropy,
)

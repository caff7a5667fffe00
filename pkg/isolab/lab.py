"""Main IsotropyLab facade."""

import logging
from typing import List, Optional, Tuple

import numpy as np

from isolab.channels import channel_isotropy, simulation_gate
from isolab.exceptions import IsolabError
from isolab.isotropy import classify, smoothed_classify
from isolab.lemmas import run_lemma_suite
from isolab.models import (
    GateVerdict,
    IsolabConfig,
    IsotropyReport,
    LemmaReport,
    PauliForm,
    QubitChannelPTM,
    ScanRow,
    SubgroupDescriptor,
)
from isolab.pauli import StateLike, as_pauli_form
from isolab.projectors import project, twirl_numeric
from isolab.scan import scan_tetrahedron
from isolab.su2 import subgroup_quadrature

logger = logging.getLogger(__name__)


class IsotropyLab:
    """Isotropy classification with one set of configured tolerances."""

    def __init__(self, config: IsolabConfig):
        """Initialize lab with configuration."""
        self.config = config

    @classmethod
    def from_env(cls) -> 'IsotropyLab':
        """Create lab from environment variables."""
        config = IsolabConfig.from_env()
        return cls(config)

    def classify(self, state: StateLike) -> IsotropyReport:
        """Exact isotropy subgroup of a state."""
        try:
            return classify(state, self.config.tol, self.config.tol_abs)
        except np.linalg.LinAlgError as e:
            raise IsolabError(f"Failed to classify state: {e}") from e

    def smoothed_classify(self, state: StateLike, eps: float) -> IsotropyReport:
        """Largest isotropy within trace distance eps."""
        try:
            return smoothed_classify(state, eps, self.config.tol, self.config.tol_abs)
        except np.linalg.LinAlgError as e:
            raise IsolabError(f"Failed to classify state at eps={eps}: {e}") from e

    def project(self, H: SubgroupDescriptor, state: StateLike) -> PauliForm:
        """Apply the analytic twirl P_H."""
        return project(H, as_pauli_form(state))

    def twirl_numeric(self, H: SubgroupDescriptor, state: StateLike) -> PauliForm:
        """Quadrature twirl with the configured circle resolution."""
        rule = subgroup_quadrature(H, self.config.n_circle)
        return twirl_numeric(H, as_pauli_form(state), rule)

    def channel_isotropy(self, channel: QubitChannelPTM) -> IsotropyReport:
        """Isotropy subgroup of a single-qubit channel."""
        try:
            return channel_isotropy(channel, self.config.tol, self.config.tol_abs)
        except np.linalg.LinAlgError as e:
            raise IsolabError(f"Failed to classify channel: {e}") from e

    def gate(self, state: StateLike, channel: QubitChannelPTM) -> GateVerdict:
        """Simulation gate: RuledOut when the resource's isotropy is not inside the channel's."""
        verdict = simulation_gate(self.classify(state), self.channel_isotropy(channel))
        logger.info("Simulation gate verdict: %s", verdict.value)
        return verdict

    def scan(self, resolution: int, eps: float = 0.0) -> Tuple[List[ScanRow], int]:
        """Classify the T-state tetrahedron grid."""
        try:
            return scan_tetrahedron(
                resolution, eps, self.config.tol, self.config.tol_abs, threads=self.config.threads
            )
        except np.linalg.LinAlgError as e:
            raise IsolabError(f"Scan failed at resolution {resolution}: {e}") from e

    def verify_lemmas(self, seed: Optional[int] = None, n_trials: int = 100) -> LemmaReport:
        """Run the property suite; the configured seed is used when none is given."""
        seed = self.config.seed if seed is None else seed
        try:
            return run_lemma_suite(seed, n_trials, self.config.tol, self.config.tol_abs)
        except np.linalg.LinAlgError as e:
            raise IsolabError(f"Lemma suite failed: {e}") from e

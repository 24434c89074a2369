"""
Resolvers for runner dispatch.

Each resolver maps one key (a certify or construct mode, a finished result)
to the thing the runner needs for it.
"""
from typing import Any, Callable, Dict, Optional

from bittensor.utils.btlogging import logging

from homsense.adapters.job_source import (
    parse_count,
    parse_matrix_json,
    parse_permutation,
    parse_projection,
    parse_sign_mode,
    require,
)
from homsense.certify import (
    certify_cor3,
    certify_prop4,
    certify_prop5,
    certify_thm1,
    certify_thm2,
    refute_by_sampling,
)
from homsense.constants import EXIT_OK, EXIT_REFUTED, EXIT_UNDECIDED
from homsense.construct import construct_boundary, construct_general, construct_half, construct_witness
from homsense.domain.certificate import UniquenessCertificate, Verdict, WitnessSubspace
from homsense.domain.config import SamplingConfig
from homsense.domain.instance import CollisionReport
from homsense.domain.matrix import RationalMatrix
from homsense.errors import InputFormatError

Certifier = Callable[[Dict[str, Any]], UniquenessCertificate]


class CertifierResolver:
    """
    Resolves a certify mode to a callable taking the parsed input document.

    Undecided pair certificates are handed to refute_by_sampling when
    `refute` is set.
    """

    def __init__(self, sampling_config: SamplingConfig, seed: int = 0, refute: bool = False):
        """
        Initialize certifier resolver.

        Args:
            sampling_config: Sampling settings for the randomized routes
            seed: Base seed for H and V sampling
            refute: Try refute_by_sampling on undecided pair certificates
        """
        self.sampling_config = sampling_config
        self.seed = seed
        self.refute = refute
        self._certifiers: Dict[str, Certifier] = {
            "prop5": self._prop5,
            "thm1": self._thm1,
            "thm2": self._thm2,
            "cor3": self._cor3,
            "prop4": self._prop4,
        }

    def __call__(self, mode: str) -> Certifier:
        """
        Resolve the certifier for a mode.

        Args:
            mode: One of prop5, thm1, thm2, cor3, prop4

        Returns:
            Callable mapping the input document to a certificate

        Raises:
            InputFormatError: for an unknown mode
        """
        try:
            certifier = self._certifiers[mode]
        except KeyError:
            raise InputFormatError(f"unknown certify mode '{mode}'") from None
        logging.debug(f"CertifierResolver: mode={mode}, seed={self.seed}, refute={self.refute}")
        return certifier

    def _maybe_refute(self, certificate: UniquenessCertificate, t1: RationalMatrix, t2: RationalMatrix):
        if not self.refute or certificate.verdict is not Verdict.UNDECIDED:
            return certificate
        logging.info(f"CertifierResolver: {certificate.route.value} undecided, searching for a counterexample")
        refutation = refute_by_sampling(
            t1, t2, certificate.n, certificate.route, certificate.sign_mode, self.seed, self.sampling_config,
        )
        if refutation.verdict is Verdict.REFUTED:
            return certificate.with_verdict(
                Verdict.REFUTED, refutation.counterexample, refutation=refutation.evidence,
            )
        return certificate.with_verdict(Verdict.UNDECIDED, refutation=refutation.evidence)

    def _prop5(self, document: Dict[str, Any]) -> UniquenessCertificate:
        matrix = parse_matrix_json(require(document, "T"), "T")
        certificate = certify_prop5(matrix, parse_count(document, "n"), parse_sign_mode(document))
        return self._maybe_refute(certificate, matrix, RationalMatrix.identity(matrix.rows))

    def _pair(self, document: Dict[str, Any]):
        return parse_matrix_json(require(document, "T1"), "T1"), parse_matrix_json(require(document, "T2"), "T2")

    def _thm1(self, document: Dict[str, Any]) -> UniquenessCertificate:
        t1, t2 = self._pair(document)
        certificate = certify_thm1(
            t1, t2, parse_count(document, "n"), self.seed, parse_sign_mode(document), self.sampling_config,
        )
        return self._maybe_refute(certificate, t1, t2)

    def _prop4(self, document: Dict[str, Any]) -> UniquenessCertificate:
        t1, t2 = self._pair(document)
        return certify_prop4(t1, t2, parse_count(document, "n"), self.seed)

    def _permutations(self, document: Dict[str, Any]):
        pi1 = parse_permutation(require(document, "pi1"), "pi1")
        pi2 = parse_permutation(document.get("pi2", {"perm": list(range(pi1.size))}), "pi2")
        rho1 = parse_projection(document.get("rho1"), "rho1", pi1.size)
        rho2 = parse_projection(document.get("rho2"), "rho2", pi1.size)
        return pi1, pi2, rho1, rho2, parse_count(document, "n")

    def _thm2(self, document: Dict[str, Any]) -> UniquenessCertificate:
        return certify_thm2(*self._permutations(document))

    def _cor3(self, document: Dict[str, Any]) -> UniquenessCertificate:
        return certify_cor3(*self._permutations(document))


class ConstructorResolver:
    """Resolves a construct mode to a witness constructor (T, n) -> WitnessSubspace."""

    _CONSTRUCTORS = {
        "auto": construct_witness,
        "boundary": construct_boundary,
        "half": construct_half,
        "general": construct_general,
    }

    def __call__(self, mode: str) -> Callable[[RationalMatrix, int], WitnessSubspace]:
        try:
            return self._CONSTRUCTORS[mode]
        except KeyError:
            raise InputFormatError(f"unknown construct mode '{mode}'") from None


class ExitCodeResolver:
    """
    Resolves a finished result to the process exit code.

    Certified / clean / plain success -> 0, undecided -> 2,
    refuted / violations found -> 3. An int result is already an exit code.
    """

    def __call__(self, result: Optional[Any]) -> int:
        if isinstance(result, int):
            return result
        if isinstance(result, UniquenessCertificate):
            return {
                Verdict.CERTIFIED: EXIT_OK,
                Verdict.UNDECIDED: EXIT_UNDECIDED,
                Verdict.REFUTED: EXIT_REFUTED,
            }[result.verdict]
        if isinstance(result, CollisionReport):
            return EXIT_OK if result.is_clean else EXIT_REFUTED
        return EXIT_OK

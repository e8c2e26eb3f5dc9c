"""Result record shared by the series and brute-force pipelines."""

from __future__ import annotations

from dataclasses import asdict, dataclass

QUANTITY_FIELDS = (
    "fidelity",
    "mutual_info_bits",
    "conditional_entropy_bits",
    "capacity_bits",
    "coherent_info_bits",
)


@dataclass(frozen=True)
class ChannelQuantities:
    """Every channel figure of merit at one parameter point.

    ``capacity_bits`` is the classical capacity for classical rows and the
    coherent information for quantum rows (the two curves plotted together).
    ``coherent_info_bits`` is always minus the conditional entropy at
    ``alpha_sq = 1/2`` for the row's protocol, unless maximization was asked for.
    """

    fidelity: float
    mutual_info_bits: float
    conditional_entropy_bits: float
    capacity_bits: float
    coherent_info_bits: float
    source_entropy_bits: float

    def as_dict(self) -> dict:
        return asdict(self)

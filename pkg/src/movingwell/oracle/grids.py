from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from movingwell.core import DomainError

type RealArray = NDArray[np.float64]


@dataclass(frozen=True, slots=True)
class SpacetimeGrid:
    """A 2-D set of (z, t) sample points, stored as arrays of shape (nt, nz)."""

    z: RealArray
    t: RealArray
    description: str

    def __post_init__(self) -> None:
        if self.z.shape != self.t.shape or self.z.ndim != 2:
            raise DomainError("bad_grid", "z and t must be 2-D arrays of equal shape")
        if not (np.all(np.isfinite(self.z)) and np.all(np.isfinite(self.t))):
            raise DomainError("bad_grid", "grid coordinates must be finite")

    @property
    def shape(self) -> tuple[int, int]:
        nt, nz = self.z.shape
        return (nt, nz)

    @property
    def size(self) -> int:
        return int(self.z.size)

    def rows(self, index: range) -> SpacetimeGrid:
        """Sub-grid of the given time rows, used to split work into panels."""

        return SpacetimeGrid(
            z=self.z[index.start : index.stop],
            t=self.t[index.start : index.stop],
            description=f"{self.description} rows[{index.start}:{index.stop}]",
        )

    @classmethod
    def rectangle(
        cls, *, z_lo: float, z_hi: float, t_lo: float, t_hi: float, nz: int, nt: int
    ) -> SpacetimeGrid:
        if z_hi <= z_lo or t_hi < t_lo or nz < 2 or nt < 1:
            raise DomainError(
                "bad_grid",
                "rectangle needs z_lo < z_hi, t_lo <= t_hi, nz >= 2 and nt >= 1",
                {"z_lo": z_lo, "z_hi": z_hi, "t_lo": t_lo, "t_hi": t_hi},
            )
        z_axis = np.linspace(z_lo, z_hi, nz)
        t_axis = np.linspace(t_lo, t_hi, nt)
        t_mesh, z_mesh = np.meshgrid(t_axis, z_axis, indexing="ij")
        return cls(
            z=z_mesh,
            t=t_mesh,
            description=f"rectangle z=[{z_lo:.6g},{z_hi:.6g}] t=[{t_lo:.6g},{t_hi:.6g}] {nt}x{nz}",
        )

    @classmethod
    def well_slab(
        cls, *, v: float, t_lo: float, t_hi: float, nz: int, nt: int, margin: float = 0.05
    ) -> SpacetimeGrid:
        """Points z = s·v·t with s ∈ [margin, 1 − margin], t ∈ [t_lo, t_hi]."""

        if v <= 0 or t_lo <= 0 or t_hi < t_lo or not 0 <= margin < 0.5 or nz < 2 or nt < 1:
            raise DomainError(
                "bad_grid",
                "well slab needs v > 0, 0 < t_lo <= t_hi and 0 <= margin < 0.5",
                {"v": v, "t_lo": t_lo, "t_hi": t_hi, "margin": margin},
            )
        s_axis = np.linspace(margin, 1.0 - margin, nz)
        t_axis = np.linspace(t_lo, t_hi, nt)
        t_mesh, s_mesh = np.meshgrid(t_axis, s_axis, indexing="ij")
        return cls(
            z=s_mesh * v * t_mesh,
            t=t_mesh,
            description=(
                f"well slab v={v:.6g} s=[{margin:.6g},{1.0 - margin:.6g}] "
                f"t=[{t_lo:.6g},{t_hi:.6g}] {nt}x{nz}"
            ),
        )

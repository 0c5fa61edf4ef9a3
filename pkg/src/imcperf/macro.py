"""Macro-level composition: full AIMC/DIMC array metrics from component costs.

An analog macro converts per-cycle bitline sums through one ADC per weight-bit
column and recombines the weight bits in a digital shift-add tree per output.
A digital macro multiplies at every cell with NAND gates and reduces along the
input dimension with adder trees. Both accumulate bit-serial input slices over
ceil(b_i/b_cycle) cycles.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace

from .components import (
    ComponentCost,
    TechnologyParams,
    accumulator_cost,
    adc_area,
    adc_delay,
    adc_energy,
    adc_resolution,
    adder_tree_cost,
    ceil_log2,
    cell_array_energy,
    dac_energy,
    multiplier_cost,
    register_cost,
    sram_array_area,
)

__all__ = [
    "ImcType",
    "ImcMacroConfig",
    "MacroMetrics",
    "BREAKDOWN_COMPONENTS",
    "aimc_macro_metrics",
    "dimc_macro_metrics",
    "macro_metrics",
    "per_cycle_energy",
    "per_mvm_register_energy",
    "resolve_layer_precisions",
]

# Fixed breakdown key set, identical for both macro types; absent components
# carry zero-valued entries so downstream serialization has a stable schema.
BREAKDOWN_COMPONENTS: tuple[str, ...] = (
    "cell_array",
    "dac",
    "adc",
    "multiplier",
    "adder_tree",
    "combine_tree",
    "accumulator",
    "input_register",
    "pipeline_register",
)


class ImcType(enum.Enum):
    AIMC = "aimc"
    DIMC = "dimc"


@dataclass(frozen=True)
class ImcMacroConfig:
    """One IMC design point.

    d_i rows share a bitline/adder tree, d_o output columns run in parallel,
    each storing b_w weight bits; b_cycle input bits enter per cycle (defaults:
    2 for AIMC, 1 for DIMC). m cells share one compute port and contribute
    storage only. input_toggle_rate and weight_sparsity form the activity
    factor for data-dependent switching.
    """

    imc_type: ImcType
    d_i: int
    d_o: int
    b_i: int = 8
    b_w: int = 8
    b_cycle: int | None = None
    m: int = 1
    n_macros: int = 1
    input_toggle_rate: float = 0.5
    weight_sparsity: float = 0.0
    pipelined: bool = False
    b_o: int = 8
    adc_resolution_from_full_precision: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.imc_type, ImcType):
            raise ValueError(f"imc_type must be an ImcType, got {self.imc_type!r}")
        if self.b_cycle is None:
            default = 2 if self.imc_type is ImcType.AIMC else 1
            object.__setattr__(self, "b_cycle", default)
        for name in ("d_i", "d_o", "b_i", "b_w", "b_cycle", "b_o", "m", "n_macros"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")
        if self.b_cycle > self.b_i:
            raise ValueError(
                f"b_cycle ({self.b_cycle}) cannot exceed b_i ({self.b_i})")
        for name in ("input_toggle_rate", "weight_sparsity"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        if self.b_i % self.b_cycle != 0:
            warnings.warn(
                f"b_cycle ({self.b_cycle}) does not divide b_i ({self.b_i}); "
                "cycle count rounds up and the last cycle is partially idle",
                stacklevel=2,
            )

    @property
    def activity(self) -> float:
        return self.input_toggle_rate * (1.0 - self.weight_sparsity)

    @property
    def cycles_per_mvm(self) -> int:
        return -(-self.b_i // self.b_cycle)


@dataclass(frozen=True)
class MacroMetrics:
    """Peak metrics of one design point; totals cover all n_macros.

    energy_per_mvm is the energy of one MVM wave across every macro, so
    tops_per_w and tops_per_mm2 are independent of n_macros. Breakdown maps
    component name to (energy per MVM, clock-path delay contribution, area).
    """

    energy_per_mvm: float
    clock_period: float
    cycles_per_mvm: int
    area: float
    tops: float
    tops_per_w: float
    tops_per_mm2: float
    breakdown: dict[str, ComponentCost] = field(repr=False)


def resolve_layer_precisions(cfg: ImcMacroConfig, b_i: int, b_w: int,
                             b_o: int) -> ImcMacroConfig:
    """Macro config with per-layer precision overrides applied.

    b_cycle is clamped to the new b_i so low-precision layers stay valid.
    """
    return replace(cfg, b_i=b_i, b_w=b_w, b_o=b_o,
                   b_cycle=min(cfg.b_cycle, b_i))


def _aimc_widths(params: TechnologyParams, cfg: ImcMacroConfig) -> tuple[int, int, int]:
    res_bits = cfg.b_i if cfg.adc_resolution_from_full_precision else cfg.b_cycle
    res = adc_resolution(params, res_bits, cfg.d_i)
    b_adds_out = res + ceil_log2(cfg.b_w)
    b_acc = b_adds_out + (cfg.b_i - cfg.b_cycle)
    return res, b_adds_out, b_acc


def _dimc_widths(cfg: ImcMacroConfig) -> tuple[int, int, int]:
    tree_out = cfg.b_w + ceil_log2(cfg.d_i)
    b_adds_out = tree_out + (ceil_log2(max(cfg.b_cycle, 2)) if cfg.b_cycle > 1 else 0)
    b_acc = b_adds_out + (cfg.b_i - cfg.b_cycle)
    return tree_out, b_adds_out, b_acc


def per_cycle_energy(params: TechnologyParams, cfg: ImcMacroConfig,
                     rows_used: int | None = None,
                     cols_used: int | None = None) -> dict[str, float]:
    """Per-cycle energy of one macro, by component, with row/column gating.

    rows_used/cols_used default to the full array. Gated components draw
    energy in proportion to active rows or columns; the analog cell array is
    not gated (every bitline spans the physical column and switches whenever
    the array computes), which is what makes oversized analog arrays costly
    for small workloads.
    """
    rows = cfg.d_i if rows_used is None else rows_used
    cols = cfg.d_o if cols_used is None else cols_used
    if not 0 <= rows <= cfg.d_i:
        raise ValueError(f"rows_used must lie in [0, d_i], got {rows!r}")
    if not 0 <= cols <= cfg.d_o:
        raise ValueError(f"cols_used must lie in [0, d_o], got {cols!r}")

    alpha = cfg.activity
    energies = dict.fromkeys(BREAKDOWN_COMPONENTS, 0.0)

    if cfg.imc_type is ImcType.AIMC:
        res, b_adds_out, b_acc = _aimc_widths(params, cfg)
        energies["cell_array"] = cell_array_energy(params, cfg.b_w, cfg.d_i, cfg.d_o, alpha)
        energies["dac"] = rows * dac_energy(params, cfg.b_cycle)
        energies["adc"] = cols * cfg.b_w * adc_energy(params, res)
        tree = adder_tree_cost(params, cfg.b_w, res, alpha)
        energies["combine_tree"] = cols * tree.energy
        energies["accumulator"] = cols * accumulator_cost(params, b_acc, b_adds_out).energy
        if cfg.pipelined:
            energies["pipeline_register"] = cols * res * cfg.b_w * params.dff_energy
    else:
        tree_out, b_adds_out, b_acc = _dimc_widths(cfg)
        energies["multiplier"] = (rows * cols * cfg.b_w * cfg.b_cycle
                                  * multiplier_cost(params).energy * alpha)
        tree = adder_tree_cost(params, cfg.d_i, cfg.b_w, alpha)
        # Idle rows feed constant zeros into the tree, so tree switching scales
        # with the populated row fraction even though the tree is full-depth.
        energies["adder_tree"] = cols * cfg.b_cycle * tree.energy * (rows / cfg.d_i)
        if cfg.b_cycle > 1:
            combine = adder_tree_cost(params, cfg.b_cycle, tree_out, alpha)
            energies["combine_tree"] = cols * combine.energy
        energies["accumulator"] = cols * accumulator_cost(params, b_acc, b_adds_out).energy
        if cfg.pipelined:
            energies["pipeline_register"] = cols * cfg.b_w * cfg.d_i * params.dff_energy

    return energies


def per_mvm_register_energy(params: TechnologyParams, cfg: ImcMacroConfig,
                            rows_used: int | None = None) -> float:
    """Input-register write energy of one macro, paid once per MVM."""
    rows = cfg.d_i if rows_used is None else rows_used
    if not 0 <= rows <= cfg.d_i:
        raise ValueError(f"rows_used must lie in [0, d_i], got {rows!r}")
    return register_cost(params, rows * cfg.b_i).energy


def _clock_and_delays(params: TechnologyParams,
                      cfg: ImcMacroConfig) -> tuple[float, dict[str, float]]:
    """Clock period and per-component critical-path contributions."""
    delays = dict.fromkeys(BREAKDOWN_COMPONENTS, 0.0)
    if cfg.imc_type is ImcType.AIMC:
        res, b_adds_out, b_acc = _aimc_widths(params, cfg)
        delays["adc"] = adc_delay(params, res, cfg.d_i)
        delays["combine_tree"] = adder_tree_cost(params, cfg.b_w, res, 1.0).delay
        delays["accumulator"] = accumulator_cost(params, b_acc, b_adds_out).delay
        before_tree = delays["adc"]
    else:
        tree_out, b_adds_out, b_acc = _dimc_widths(cfg)
        delays["multiplier"] = multiplier_cost(params).delay
        delays["adder_tree"] = adder_tree_cost(params, cfg.d_i, cfg.b_w, 1.0).delay
        if cfg.b_cycle > 1:
            delays["combine_tree"] = adder_tree_cost(params, cfg.b_cycle, tree_out, 1.0).delay
        delays["accumulator"] = accumulator_cost(params, b_acc, b_adds_out).delay
        before_tree = delays["multiplier"]

    total = sum(delays.values())
    if cfg.pipelined:
        # Single register boundary before the reduction/combine tree.
        clock = max(before_tree, total - before_tree)
    else:
        clock = total
    return clock, delays


def _areas(params: TechnologyParams, cfg: ImcMacroConfig) -> dict[str, float]:
    """Per-macro area by component."""
    areas = dict.fromkeys(BREAKDOWN_COMPONENTS, 0.0)
    n_cells = cfg.d_i * cfg.d_o * cfg.b_w * cfg.m
    areas["cell_array"] = sram_array_area(params, n_cells)
    areas["input_register"] = register_cost(params, cfg.d_i * cfg.b_i).area

    if cfg.imc_type is ImcType.AIMC:
        res, b_adds_out, b_acc = _aimc_widths(params, cfg)
        areas["adc"] = cfg.d_o * cfg.b_w * adc_area(params, res)
        areas["combine_tree"] = cfg.d_o * adder_tree_cost(params, cfg.b_w, res, 1.0).area
        areas["accumulator"] = cfg.d_o * accumulator_cost(params, b_acc, b_adds_out).area
        if cfg.pipelined:
            areas["pipeline_register"] = register_cost(
                params, cfg.d_o * res * cfg.b_w).area
    else:
        tree_out, b_adds_out, b_acc = _dimc_widths(cfg)
        areas["multiplier"] = (cfg.d_i * cfg.d_o * cfg.b_w * cfg.b_cycle
                               * multiplier_cost(params).area)
        areas["adder_tree"] = (cfg.d_o * cfg.b_cycle
                               * adder_tree_cost(params, cfg.d_i, cfg.b_w, 1.0).area)
        if cfg.b_cycle > 1:
            areas["combine_tree"] = (cfg.d_o
                                     * adder_tree_cost(params, cfg.b_cycle, tree_out, 1.0).area)
        areas["accumulator"] = cfg.d_o * accumulator_cost(params, b_acc, b_adds_out).area
        if cfg.pipelined:
            areas["pipeline_register"] = register_cost(
                params, cfg.d_o * cfg.b_w * cfg.d_i).area

    return areas


def _compose_metrics(params: TechnologyParams, cfg: ImcMacroConfig) -> MacroMetrics:
    cycles = cfg.cycles_per_mvm
    cycle_energies = per_cycle_energy(params, cfg)
    reg_energy = per_mvm_register_energy(params, cfg)
    clock, delays = _clock_and_delays(params, cfg)
    areas = _areas(params, cfg)

    n = cfg.n_macros
    breakdown: dict[str, ComponentCost] = {}
    for name in BREAKDOWN_COMPONENTS:
        per_mvm = cycle_energies[name] * cycles
        if name == "input_register":
            per_mvm += reg_energy
        breakdown[name] = ComponentCost(
            energy=per_mvm * n,
            delay=delays[name],
            area=areas[name] * n,
        )

    energy_per_mvm = sum(c.energy for c in breakdown.values())
    area = sum(c.area for c in breakdown.values())
    ops = 2.0 * cfg.d_i * cfg.d_o * n
    tops = ops / (clock * cycles)
    return MacroMetrics(
        energy_per_mvm=energy_per_mvm,
        clock_period=clock,
        cycles_per_mvm=cycles,
        area=area,
        tops=tops,
        tops_per_w=ops / energy_per_mvm,
        tops_per_mm2=tops / (area * 1e-6),
        breakdown=breakdown,
    )


def aimc_macro_metrics(params: TechnologyParams, cfg: ImcMacroConfig) -> MacroMetrics:
    """Peak metrics of an analog macro: DAC, cell array, ADCs, shift-add trees."""
    if cfg.imc_type is not ImcType.AIMC:
        raise ValueError(f"expected an AIMC config, got {cfg.imc_type!r}")
    return _compose_metrics(params, cfg)


def dimc_macro_metrics(params: TechnologyParams, cfg: ImcMacroConfig) -> MacroMetrics:
    """Peak metrics of a digital macro: NAND multipliers, adder trees, accumulators."""
    if cfg.imc_type is not ImcType.DIMC:
        raise ValueError(f"expected a DIMC config, got {cfg.imc_type!r}")
    return _compose_metrics(params, cfg)


def macro_metrics(params: TechnologyParams, cfg: ImcMacroConfig) -> MacroMetrics:
    """Dispatch on the macro type."""
    if cfg.imc_type is ImcType.AIMC:
        return aimc_macro_metrics(params, cfg)
    if cfg.imc_type is ImcType.DIMC:
        return dimc_macro_metrics(params, cfg)
    raise ValueError(f"unknown imc_type {cfg.imc_type!r}")

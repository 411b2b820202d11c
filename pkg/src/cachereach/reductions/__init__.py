"""Constructions turning SAT, Hamiltonian-circuit and register-machine
instances into cache analysis instances."""

from .common import ReductionOutput, format_reduction, parse_header, parse_reduction
from .evict import (fifo_concrete_survivor, fifo_eviction_survivor, plru_certified_flush_length,
                    plru_evict_all_sequence, plru_eviction_bound, plru_eviction_survivor)
from .fifo import (brm_to_fifo, fifo_arbitrary_prologue, fifo_evict_all_prologue, fifo_to_prr,
                   fifo_wellformed, fifo_wellphased)
from .lru import (ham_to_lru_miss, limit_literal_occurrences, lru_fresh_prologue,
                  lru_loader_gadget, occurrence_audit, sat_to_lru_hit)
from .nmru import brm_to_nmru, nmru_wellformed, nmru_wellphased
from .plru import (brm_to_plru, plru_arbitrary_prologue, plru_pi_sequence, plru_wellformed,
                   plru_wellphased, plru_z_sequence)

__all__ = [
    "ReductionOutput", "format_reduction", "parse_header", "parse_reduction",
    "fifo_concrete_survivor", "fifo_eviction_survivor", "plru_certified_flush_length",
    "plru_evict_all_sequence", "plru_eviction_bound", "plru_eviction_survivor",
    "brm_to_fifo", "fifo_arbitrary_prologue", "fifo_evict_all_prologue", "fifo_to_prr",
    "fifo_wellformed", "fifo_wellphased",
    "ham_to_lru_miss", "limit_literal_occurrences", "lru_fresh_prologue", "lru_loader_gadget",
    "occurrence_audit", "sat_to_lru_hit",
    "brm_to_nmru", "nmru_wellformed", "nmru_wellphased",
    "brm_to_plru", "plru_arbitrary_prologue", "plru_pi_sequence", "plru_wellformed",
    "plru_wellphased", "plru_z_sequence",
]

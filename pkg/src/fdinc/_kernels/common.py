"""Shared result types for the kernel backends.

Both backends (pure Python and the compiled extension) implement the same
three kernels with identical observable behaviour, including tie-breaking:

``diff_masks_for_pairs`` / ``diff_masks_all_pairs``
    Difference-set bitmasks of tuple pairs; empty masks are dropped.

``mmcs_extend``
    Branch-and-prune enumeration of minimal hitting sets that contain a given
    base set, using critical-edge pruning (MMCS-style search).

``scan_block``
    Bucket one value-homogeneous block of rows by exact LHS key, detect the
    first conflicting pair in scan order, count bucket sizes, and optionally
    probe the buckets with delta keys.
"""

from collections import namedtuple

# internal: (bucket_first_row, conflicting_row) | None  -- base-vs-base conflict
# cross:    (bucket_first_row, probe_index) | None      -- base-vs-probe conflict
# groups:   [(first_row, count)] for unmatched buckets with count >= min_count
# matches:  [(probe_index, first_row, count)] for probes that hit a bucket
BlockScan = namedtuple("BlockScan", ["internal", "cross", "groups", "matches"])

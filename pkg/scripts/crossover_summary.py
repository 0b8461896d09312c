#!/usr/bin/env python3
"""Statistical-vs-conventional crossover SNRs for the shipped presets.

For each preset scenario, finds the first SNR at which the statistical
combiner's average SE exceeds the conventional one, and the relative gain at
30 dB.  All numbers come from the deterministic equivalents, so this is fast
and exactly reproducible.

Usage:
    python3 scripts/crossover_summary.py [fig2a fig2b fig5 ...]
"""

import argparse
import json

from rician_mimo.presets import PRESET_IDS, preset_summary


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "figures", nargs="*", default=["fig2a", "fig2b", "fig5"],
        choices=PRESET_IDS,
    )
    args = parser.parse_args()
    for fid in args.figures:
        print(json.dumps(preset_summary(fid), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()

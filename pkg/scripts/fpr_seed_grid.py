#!/usr/bin/env python3
"""Estimate the false-positive rate over a grid of seeds.

One JSON line per seed plus a trailing summary: seeds where the
estimate exceeded epsilon + 3 sigma, and the worst estimate observed.
A handful of seed-level excursions past the 3-sigma envelope is
expected statistics, not a defect; systematic excess is a defect.
"""

import argparse
import json
import math
from concurrent.futures import ProcessPoolExecutor

from slidingbloom import INFINITE, measure_fpr


def _parse_slack(text):
    return INFINITE if text.lower() in ("inf", "infinite") else int(text)


def _one(args):
    n, m, eps, stream_len, trials, seed = args
    return measure_fpr(n, m, eps, stream_len=stream_len, trials=trials, seed=seed)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", "--window", type=int, required=True)
    ap.add_argument("-m", "--slack", type=_parse_slack, default=INFINITE)
    ap.add_argument("-e", "--epsilon", type=float, required=True)
    ap.add_argument("-T", "--trials", type=int, default=100_000)
    ap.add_argument("--seeds", type=int, default=30)
    ap.add_argument("--stream-len", type=int, default=None)
    ap.add_argument("--workers", type=int, default=2)
    args = ap.parse_args()

    m_fin = 0 if args.slack == INFINITE else args.slack
    stream_len = args.stream_len or args.window + m_fin + max(10, args.window)
    tasks = [(args.window, args.slack, args.epsilon, stream_len, args.trials, s)
             for s in range(args.seeds)]

    failures = []
    worst = 0.0
    with ProcessPoolExecutor(args.workers) as pool:
        for rep in pool.map(_one, tasks):
            print(json.dumps(rep.to_dict(), sort_keys=True))
            worst = max(worst, rep.estimate)
            if not rep.passed:
                failures.append(rep.seed)

    sigma = math.sqrt(args.epsilon * (1 - args.epsilon) / args.trials)
    print(json.dumps({
        "schema": "slidingbloom.fpr-grid/1",
        "seeds": args.seeds,
        "failed_seeds": failures,
        "worst_estimate": worst,
        "bound": args.epsilon,
        "three_sigma": 3 * sigma,
    }, sort_keys=True))


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Audit the cycle-counting inequalities over the packaged corpus.

For every corpus map with degree >= 2 this runs the full pipeline
(cycles -> critical-tail classification -> epsilon/delta marks -> count
report) and prints the two inequalities term by term:

  variant:     2*n_HR + n_SD + n_CR + delta  <=  sum(eps) + wild tails
  independent: n_SD + n_CR + 2*n_HR          <=  min(wild ram. points,
                                                     HR eps + wild tails)

The Siegel-disc entry is the interesting row: its single wild critical
tail is exactly spent on the rotation domain, so the inequality is
tight (1 <= 1) with no slack.

Run:  python3 demos/count_audit.py          (about 10 s)
"""

from ratdyn import corpus_run


def main():
    res = corpus_run()
    hdr = f"{'map':<24} {'lhs_v':>5} {'rhs_v':>5}  {'lhs_i':>5} {'rhs_i':>5}  status"
    print(hdr)
    print("-" * len(hdr))
    for entry in res["entries"]:
        rep = entry["report"]
        name = rep["name"]
        counts = rep["counts"]
        if counts is None:
            print(f"{name:<24} {'-':>5} {'-':>5}  {'-':>5} {'-':>5}  "
                  f"skipped: {rep['count_error_message']}")
            continue
        ok = counts["satisfied_v"] and counts["satisfied_i"]
        tight = (counts["lhs_v"] == counts["rhs_v"] and counts["lhs_v"] > 0)
        status = "OK" + (" (tight)" if tight else "")
        print(f"{name:<24} {counts['lhs_v']:>5} {counts['rhs_v']:>5}  "
              f"{counts['lhs_i']:>5} {counts['rhs_i']:>5}  "
              f"{status if ok else 'VIOLATED'}")
        for caveat in counts["caveats"]:
            print(f"{'':<24}   caveat: {caveat}")
    print(f"\nall expectations matched: {res['all_passed']}")


if __name__ == "__main__":
    main()

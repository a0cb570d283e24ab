"""Run the quick acceptance checks and print the scoreboard.

The default suite bundles ten statistical and exact checks; the three
replica farms take minutes each, so this tour runs the seven fast ones.
`lppgeo verify --suite default` runs everything and exits nonzero if any
check fails: the window-to-window coalescence check is known to fail at
desk scale, where a measurable fraction of geodesic pairs outlives the
span, so expect 9 of 10 there.
"""

from lppgeo.acceptance import acceptance_suite
from lppgeo.cli import FAST_TESTS


def main() -> None:
    print(f"running {len(FAST_TESTS)} of 10 checks: {', '.join(FAST_TESTS)}")
    print()
    run = acceptance_suite(config={"tests": list(FAST_TESTS)})
    print(run.summary_text())
    print()
    print("full suite: lppgeo verify --suite default   (about ten minutes)")


if __name__ == "__main__":
    main()

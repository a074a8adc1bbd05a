"""Build signatures from slot point sets, realize them as codes, and check
that analysis of each code gives back the construction."""

import time

from groupsys import fixtures
from groupsys.signature import block_report
from groupsys.synthesis import format_signature, realize, synthesize


def main():
    for name in fixtures.SPECS:
        start = time.perf_counter()
        sig = synthesize(fixtures.load_spec(name))
        real = realize(sig)
        dt = time.perf_counter() - start
        print(format_signature(sig), end="")
        print(f"realized: {real.code.size} codewords, ell {real.system.ell}, "
              f"round trip {'ok' if real.ok else 'FAILED'} ({dt:.2f} s)\n")

    real = realize(synthesize(fixtures.load_spec("block2")))
    text = block_report(real.system).format()
    print(text.split("\nfibers")[0])


if __name__ == "__main__":
    main()

"""Test double for the external generator protocol.

Usage: mock_generator.py [mode]

Modes change one behaviour so the host's error handling can be exercised:
normal, garbage, wrong-shape, slow, bad-score, out-of-range, no-disc, bad-info, crash,
reject-first (the first generate request gets an error reply).
"""

import json
import math
import sys
import time

LATENT_DIM = 4
ROWS, COLS = 6, 5


def generate(z):
    return [
        0.5 + 0.5 * math.sin(z[0] * r + z[1] * c + z[2]) * math.tanh(1.0 + abs(z[3]))
        for r in range(ROWS)
        for c in range(COLS)
    ]


def main():
    mode = sys.argv[1] if len(sys.argv) > 1 else "normal"
    out = sys.stdout
    rejected = False

    def reply(obj):
        out.write(json.dumps(obj) + "\n")
        out.flush()

    for line in sys.stdin:
        try:
            req = json.loads(line)
        except ValueError:
            reply({"error": "malformed request"})
            continue
        op = req.get("op")
        if op == "info":
            if mode == "bad-info":
                reply({"latent_dim": 0, "n_rows": ROWS, "n_cols": COLS, "supports_discriminator": True, "name": "mock"})
                continue
            reply({
                "latent_dim": LATENT_DIM,
                "n_rows": ROWS,
                "n_cols": COLS,
                "supports_discriminator": mode != "no-disc",
                "name": "mock-" + mode,
            })
        elif op == "generate":
            z = req.get("z")
            if not isinstance(z, list) or len(z) != LATENT_DIM:
                reply({"error": "latent dimension mismatch"})
                continue
            if mode == "reject-first" and not rejected:
                rejected = True
                reply({"error": "warming up"})
            elif mode == "garbage":
                out.write("this is not json\n")
                out.flush()
            elif mode == "wrong-shape":
                reply({"grid": generate(z)[:-1]})
            elif mode == "out-of-range":
                reply({"grid": [1.5] * (ROWS * COLS)})
            elif mode == "slow":
                time.sleep(5)
                reply({"grid": generate(z)})
            elif mode == "crash":
                sys.exit(3)
            else:
                reply({"grid": generate(z)})
        elif op == "discriminate":
            grid = req.get("grid")
            if not isinstance(grid, list) or len(grid) != ROWS * COLS:
                reply({"error": "grid size mismatch"})
                continue
            if mode == "bad-score":
                reply({"score": 1.5})
                continue
            mean = sum(grid) / len(grid)
            reply({"score": 1.0 / (1.0 + math.exp(-4.0 * (mean - 0.3)))})
        elif op == "shutdown":
            return 0
        else:
            reply({"error": "unknown op"})
    return 0


if __name__ == "__main__":
    sys.exit(main())

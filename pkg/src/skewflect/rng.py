"""Counter-based random streams keyed by (seed, chain, purpose).

Each chain owns a Philox generator whose key is derived from the run seed,
the chain index and a purpose tag, so a chain's draws do not depend on how
chains are grouped or scheduled.
"""

import numpy as np

NOISE = 0
BATCH = 1
INIT = 2
AUX = 3


def stream(seed: int, chain: int = 0, purpose: int = NOISE) -> np.random.Generator:
    if seed < 0 or chain < 0:
        raise ValueError("seed and chain index must be nonnegative")
    key = np.random.SeedSequence([int(seed), int(chain), int(purpose)]).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key))

"""Writing a qutrit into the torus code and reading it back.

Storage measures face operators in a fixed order and corrects the
random outcomes so that the prepared state is sum_j alpha_j |[j omega]>.
Retrieval copies the class label onto an ancilla and disentangles it.
"""

# %%
from __future__ import annotations

import numpy as np

from qudit_surface import FieldCtx, StabilizerCode
from qudit_surface.complex import build_torus_square
from qudit_surface.homology import cycle_representative
from qudit_surface.protocols import class_state, store, store_retrieve

# %%
code = StabilizerCode(build_torus_square(2, FieldCtx(3)))
omega = cycle_representative(code.complex, (1, 0))
print("storage cycle support:", omega.support())

alphas = np.array([0.6, 0.48j, 0.64])
state, transcript = store(code, alphas, omega, seed=1)
print("store fidelities:", transcript.fidelities)

# %% [markdown]
# The stored amplitudes can be read back directly by overlap with the
# class states.

# %%
for j in range(3):
    print(f"<[{j} omega]|psi> = {np.vdot(class_state(code, omega, j), state.amps):.4f}")

# %%
rt = store_retrieve(code, alphas, omega, seed=1)
print("retrieve fidelity:", rt["retrieve_fidelity"])

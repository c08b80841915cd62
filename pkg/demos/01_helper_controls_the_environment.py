# How much classical information gets through a two-qubit interaction when a
# friendly helper picks the environment's input state?

import numpy as np

from envcap.capacity import OptimizerConfig, chi_H_tensor, chi_role_swapped
from envcap.channels import cnot, controlled_unitary, effective_channel, swap_operator, uc2_blocks
from envcap.twoqubit import cq_capacity_closed_form

cfg = OptimizerConfig(restarts=16, seed=0)

# SWAP hands the sender's qubit to the environment and the helper's qubit to
# the receiver.  Whatever the helper does, the receiver sees a fixed state.
swap = swap_operator(2, 2)
print("SWAP, sender A :", chi_role_swapped(swap, "A", cfg).bits)
print("SWAP, sender H :", chi_role_swapped(swap, "H", cfg).bits)

# CNOT with the control on the sender's side: one full bit either way.
print("CNOT, sender A :", round(chi_H_tensor(cnot(), cfg).bits, 9))

# The effective channel for a fixed helper state is an ordinary channel.
eta = np.array([1, 1j]) / np.sqrt(2)
n = effective_channel(cnot(), eta)
print("Kraus operators of the CNOT effective channel:", len(n.kraus))

# Controlled unitaries interpolate between the two.  The optimizer agrees
# with the closed form along the whole family.
print("\n   u      optimizer   closed form   tag")
for u in np.linspace(0, np.pi / 2, 7):
    est = chi_H_tensor(controlled_unitary(uc2_blocks(u)), cfg)
    print(f"{u:6.3f}   {est.bits:.8f}  {cq_capacity_closed_form(u):.8f}    {est.bound}")

# Every two-qubit unitary is locally equivalent to one point of a tetrahedron.
# This script places a few gates and then builds an explicit one-bit product
# code for a random interaction.

import numpy as np

from envcap.channels import cnot, controlled_unitary, dcnot, swap_operator, uc2_blocks
from envcap.experiments import haar_unitary
from envcap.twoqubit import conferencing_code_two_qubit, kraus_cirac_angles

gates = {
    "identity": np.eye(4),
    "CNOT": cnot(),
    "DCNOT": dcnot(),
    "SWAP": swap_operator(2, 2),
    "controlled, u=0.5": controlled_unitary(uc2_blocks(0.5)),
    "Haar sample": haar_unitary(4, 1),
}
for name, g in gates.items():
    ax, ay, az = kraus_cirac_angles(g).as_tuple()
    print(f"{name:18s} ({ax / np.pi:.4f}, {ay / np.pi:.4f}, {az / np.pi:.4f}) x pi")

# Product inputs whose outputs on the receiver are |0><0| and |1><1|.
code = conferencing_code_two_qubit(haar_unitary(4, 1))
print("\nSchmidt ratios of the two inputs :", code.schmidt_ratios)
print("trace distance of the two outputs:", code.trace_distance)
print("valid code:", code.valid())

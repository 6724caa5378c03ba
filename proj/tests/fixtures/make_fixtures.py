"""Regenerate the FCIDUMP fixtures used by the test suites.

Requires pyscf. Writes <name>.fcidump plus <name>.ref.json holding the
reference HF and FCI energies computed by pyscf for cross-checking.
"""
import json

from pyscf import gto, scf, fci
from pyscf.tools import fcidump

SYSTEMS = {
    "h2": dict(atom="H 0 0 0; H 0 0 0.74", basis="sto-3g"),
    "h4_chain": dict(atom="H 0 0 0; H 0 0 1.0; H 0 0 2.0; H 0 0 3.0", basis="sto-3g"),
    "h2o_min": dict(atom="O 0 0 0.1173; H 0 0.7572 -0.4692; H 0 -0.7572 -0.4692",
                    basis="sto-3g"),
}

for name, spec in SYSTEMS.items():
    mol = gto.M(unit="Angstrom", symmetry=False, **spec)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    e_hf = mf.kernel()
    fcidump.from_scf(mf, f"{name}.fcidump", tol=1e-15)
    e_fci, _ = fci.FCI(mf).kernel()
    with open(f"{name}.ref.json", "w") as fh:
        json.dump({"e_hf": e_hf, "e_fci": e_fci, "norb": mol.nao, "nelec": mol.nelectron}, fh, indent=2)
    print(name, e_hf, e_fci)

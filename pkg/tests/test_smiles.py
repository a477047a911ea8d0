from __future__ import annotations

import random

import pytest

from molbench.canon import canonical_form, same_molecule
from molbench.graph import Atom, Bond, build_molecule, permute_molecule, total_hydrogens
from molbench.smiles import (
    SmilesSyntaxError,
    UnclosedBranch,
    UnclosedRing,
    UnsupportedFeature,
    bracket_hydrogen_deficit,
    parse_smiles,
    write_smiles,
)


class TestParse:
    def test_ethanol(self):
        mol = parse_smiles("CCO")
        assert [a.element for a in mol.atoms] == ["C", "C", "O"]
        assert len(mol.bonds) == 2

    def test_bond_symbols(self):
        assert parse_smiles("C=C").bonds[0].order == 2
        assert parse_smiles("C#N").bonds[0].order == 3
        assert parse_smiles("C-C").bonds[0].order == 1

    def test_branching(self):
        mol = parse_smiles("CC(=O)O")
        orders = sorted(b.order for b in mol.bonds)
        assert orders == [1, 1, 2]
        assert mol.degree(1) == 3

    def test_aromatic_defaults(self):
        mol = parse_smiles("c1ccccc1")
        assert all(b.order == 1.5 for b in mol.bonds)

    def test_two_letter_organic_atoms(self):
        mol = parse_smiles("ClCBr")
        assert [a.element for a in mol.atoms] == ["Cl", "C", "Br"]

    def test_bracket_charge_and_hydrogens(self):
        mol = parse_smiles("[NH4+]")
        assert mol.atoms[0].formal_charge == 1
        assert total_hydrogens(mol, 0) == 4
        assert parse_smiles("[O-2]").atoms[0].formal_charge == -2
        assert parse_smiles("[N+2]").atoms[0].formal_charge == 2

    def test_pinned_aromatic_nitrogen(self):
        mol = parse_smiles("c1cc[nH]c1")
        n = next(i for i, a in enumerate(mol.atoms) if a.element == "N")
        assert mol.atoms[n].explicit_h == 1

    def test_percent_ring_closure(self):
        a = parse_smiles("C%12CCCCC%12")
        b = parse_smiles("C1CCCCC1")
        assert same_molecule(a, b)

    def test_ring_closure_order_on_either_side(self):
        a = parse_smiles("C=1CCCCC1")
        b = parse_smiles("C1CCCCC=1")
        c = parse_smiles("C1=CCCCC1")
        assert same_molecule(a, c)
        assert same_molecule(b, c)

    def test_dot_disconnects(self):
        mol = parse_smiles("C.C")
        assert len(mol.atoms) == 2
        assert not mol.bonds

    def test_dummy_atom(self):
        mol = parse_smiles("*C")
        assert mol.atoms[0].element == "*"


class TestParseErrors:
    def test_empty(self):
        with pytest.raises(SmilesSyntaxError):
            parse_smiles("")

    def test_unclosed_ring(self):
        with pytest.raises(UnclosedRing) as err:
            parse_smiles("C1CCC")
        assert err.value.index == 1

    def test_unclosed_branch(self):
        with pytest.raises(UnclosedBranch):
            parse_smiles("CC(C")
        with pytest.raises(UnclosedBranch):
            parse_smiles("CC)C")

    def test_stereo_rejected(self):
        for text in ("C/C=C/C", "C[C@H](N)O", "F\\C=C\\F"):
            with pytest.raises(UnsupportedFeature) as err:
                parse_smiles(text)
            assert err.value.feature == "stereo"

    def test_isotope_rejected(self):
        with pytest.raises(UnsupportedFeature) as err:
            parse_smiles("[13CH4]")
        assert err.value.feature == "isotope"

    def test_dangling_bond(self):
        with pytest.raises(SmilesSyntaxError):
            parse_smiles("CC=")
        with pytest.raises(SmilesSyntaxError):
            parse_smiles("C=.C")

    def test_garbage_character(self):
        with pytest.raises(SmilesSyntaxError):
            parse_smiles("C?C")

    def test_ring_self_loop(self):
        with pytest.raises(SmilesSyntaxError):
            parse_smiles("C11")


class TestRadicalDetection:
    def test_pinned_deficit_flags(self):
        assert bracket_hydrogen_deficit("[CH3]")
        assert bracket_hydrogen_deficit("[CH2]C")

    def test_saturated_brackets_pass(self):
        assert not bracket_hydrogen_deficit("[CH4]")
        assert not bracket_hydrogen_deficit("[NH4+]")
        assert not bracket_hydrogen_deficit("c1cc[nH]c1")
        assert not bracket_hydrogen_deficit("CCO")


class TestWrite:
    @pytest.mark.parametrize(
        "smiles",
        [
            "CCO",
            "CC(=O)O",
            "c1ccccc1",
            "c1ccncc1",
            "c1cc[nH]c1",
            "CC(C)(C)C",
            "C1CC2CCC1CC2",
            "FC1=CC=C(F)C=C1",
            "[NH4+].[O-]C(=O)C",
            "O=S(=O)(O)O",
            "C#N",
        ],
    )
    def test_round_trip(self, smiles):
        mol = parse_smiles(smiles)
        assert same_molecule(parse_smiles(write_smiles(mol)), mol)

    def test_output_is_kekulized_uppercase(self):
        text = write_smiles(parse_smiles("c1ccccc1"))
        assert "c" not in text
        assert ":" not in text
        assert text.count("=") == 3

    def test_canonical_is_byte_deterministic(self):
        mol = parse_smiles("CC(=O)Oc1ccccc1C(=O)O")
        base = write_smiles(mol, ordering="canonical")
        rng = random.Random(9)
        for _ in range(25):
            perm = list(range(len(mol.atoms)))
            rng.shuffle(perm)
            shuffled = permute_molecule(mol, perm)
            assert write_smiles(shuffled, ordering="canonical") == base

    def test_unknown_ordering_rejected(self):
        with pytest.raises(ValueError):
            write_smiles(parse_smiles("C"), ordering="random")

    def test_zero_order_bond_unwritable(self):
        mol = build_molecule(
            [Atom("C"), Atom("O")], [Bond(0, 1, 0)]
        )
        with pytest.raises(ValueError):
            write_smiles(mol)

    def test_charged_atoms_bracketed(self):
        text = write_smiles(parse_smiles("[NH4+]"))
        assert text == "[NH4+]"

    def test_multi_fragment_written_with_dot(self):
        text = write_smiles(parse_smiles("O.CC"))
        assert "." in text


def test_canonical_smiles_stable_for_equal_molecules():
    a = parse_smiles("C1=CC=CC=C1")
    b = parse_smiles("c1ccccc1")
    assert canonical_form(a) == canonical_form(b)
    assert write_smiles(a, ordering="canonical") == write_smiles(b, ordering="canonical")

"""Fixed-column PDB parsing: ordered C-alpha point clouds per chain.

Only ATOM records of the first model are consulted.  Parsing follows the PDB
3.3 column layout (coordinates in columns 31-54) rather than whitespace
splitting, which breaks on fused columns.  HETATM records and non-standard
residues are ignored; residues lacking a C-alpha are skipped.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .curve import PointCloud
from .errors import MalformedRecord, NoAtoms, TooShort

log = logging.getLogger(__name__)

# The 20 canonical amino-acid residue names.
STANDARD_RESIDUES = frozenset([
    "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE",
    "LEU", "LYS", "MET", "PHE", "PRO", "SER", "THR", "TRP", "TYR", "VAL",
])


@dataclass(frozen=True)
class Residue:
    """One residue's C-alpha position."""

    seq_number: int
    insertion_code: str  # '' when blank
    ca_position: np.ndarray  # 3-vector, Angstrom

    def __post_init__(self):
        pos = np.asarray(self.ca_position, dtype=np.float64)
        if pos.shape != (3,) or not np.all(np.isfinite(pos)):
            raise ValueError("ca_position must be a finite 3-vector")
        object.__setattr__(self, "ca_position", pos)


@dataclass
class Chain:
    """Residues of one chain, sorted by (seq_number, insertion_code)."""

    chain_id: str
    residues: list[Residue] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.residues)


def _lines(text: str | bytes | Iterable[str]) -> Iterable[str]:
    if isinstance(text, bytes):
        # latin-1 never fails; arbitrary bytes must not crash the parser
        text = text.decode("latin-1")
    if isinstance(text, str):
        return text.splitlines()
    return text


def parse_pdb(text: str | bytes | Iterable[str]) -> list[Chain]:
    """Parse PDB-format text into per-chain C-alpha residue lists.

    Rules: ATOM records only, first MODEL only, alternate locations other
    than blank or 'A' skipped, standard amino acids only, and the first
    C-alpha record per (seq_number, insertion_code) wins.  Chains come back
    in file order with residues sorted by (seq_number, insertion_code).

    Raises:
        MalformedRecord: ATOM line too short for the coordinate columns, or
            with non-numeric coordinates / residue number (with line number).
        NoAtoms: no ATOM records at all.
    """
    chains: dict[str, Chain] = {}
    seen: dict[str, set[tuple[int, str]]] = {}
    saw_atom = False
    in_model = 0

    for lineno, line in enumerate(_lines(text), start=1):
        record = line[:6]
        if record.startswith("ENDMDL") or (record.startswith("MODEL") and in_model):
            break  # first model only
        if record.startswith("MODEL"):
            in_model = 1
            continue
        if record.rstrip() != "ATOM":
            continue
        saw_atom = True

        if len(line) < 54:
            raise MalformedRecord(
                f"ATOM record has {len(line)} columns, need 54 for coordinates", lineno)
        atom_name = line[12:16].strip()
        alt_loc = line[16]
        res_name = line[17:20].strip()
        if atom_name != "CA" or alt_loc not in (" ", "A"):
            continue
        if res_name not in STANDARD_RESIDUES:
            log.debug("line %d: skipping non-standard residue %r", lineno, res_name)
            continue

        chain_id = line[21]
        try:
            seq_number = int(line[22:26])
        except ValueError:
            raise MalformedRecord(
                f"non-numeric residue sequence number {line[22:26]!r}", lineno) from None
        icode = line[26].strip()
        try:
            pos = (float(line[30:38]), float(line[38:46]), float(line[46:54]))
        except ValueError:
            raise MalformedRecord(
                f"non-numeric coordinates {line[30:54]!r}", lineno) from None

        chain = chains.get(chain_id)
        if chain is None:
            chain = chains[chain_id] = Chain(chain_id)
            seen[chain_id] = set()
        key = (seq_number, icode)
        if key in seen[chain_id]:
            continue  # first C-alpha wins
        seen[chain_id].add(key)
        chain.residues.append(Residue(seq_number, icode, np.array(pos)))

    if not saw_atom:
        raise NoAtoms("input contains no ATOM records")
    for chain in chains.values():
        chain.residues.sort(key=lambda r: (r.seq_number, r.insertion_code))
    return list(chains.values())


def extract_point_cloud(chain: Chain) -> PointCloud:
    """Stack the chain's C-alpha positions into an L x 3 point cloud.

    Raises:
        TooShort: fewer than 2 residues.
    """
    if len(chain.residues) < 2:
        raise TooShort(
            f"chain {chain.chain_id!r} has {len(chain.residues)} residues, need >= 2")
    return PointCloud(np.stack([r.ca_position for r in chain.residues]))


def chain_to_pdb_text(chain: Chain, res_name: str = "ALA") -> str:
    """Serialize a chain back to minimal ATOM records (C-alpha only).

    Coordinates are written at the PDB's %8.3f column precision, so a
    reparse reproduces positions to 1e-3 Angstrom.
    """
    lines = []
    for i, r in enumerate(chain.residues, start=1):
        icode = r.insertion_code or " "
        x, y, z = r.ca_position
        lines.append(
            f"ATOM  {i:5d}  CA  {res_name} {chain.chain_id}{r.seq_number:4d}{icode}   "
            f"{x:8.3f}{y:8.3f}{z:8.3f}  1.00  0.00           C")
    lines.append("END")
    return "\n".join(lines) + "\n"

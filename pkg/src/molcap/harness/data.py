"""Dataset ingestion, length bucketing, and the bundled synthetic corpus.

Datasets are tab-separated files with the header `cid\tsmiles\tdescription`.
Rows whose SMILES does not parse are skipped with a logged warning and
counted, so loaded + skipped always equals the file's data rows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .. import chem
from ..prompts import TASKS, build_prompt

log = logging.getLogger("molcap.data")

HEADER = ("cid", "smiles", "description")
_HEADER_LINE = "\t".join(HEADER)
LENGTH_BOUNDARIES = (34, 48)


class DataFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class CaptionRecord:
    id: str
    smiles: str
    description: str
    task: str = "caption"


@dataclass
class LoadResult:
    records: list
    skipped: int
    total_rows: int


def load_dataset(path, task: str = "caption", min_words: int | None = None) -> LoadResult:
    if task not in TASKS:
        build_prompt(task)  # raises the canonical unknown-task error
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != _HEADER_LINE:
        raise DataFormatError(f"expected header {_HEADER_LINE!r}", 1)

    records = []
    skipped = 0
    total = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        total += 1
        columns = line.split("\t")
        if len(columns) != len(HEADER):
            raise DataFormatError(f"expected {len(HEADER)} tab-separated columns, got {len(columns)}", lineno)
        cid, smiles, description = columns
        if min_words is not None and len(description.split()) < min_words:
            log.warning("line %d: description below %d words, skipping %r", lineno, min_words, cid)
            skipped += 1
            continue
        if not description.strip():
            log.warning("line %d: empty description, skipping %r", lineno, cid)
            skipped += 1
            continue
        try:
            chem.smiles_to_graph(smiles)
        except (chem.SmilesError, chem.UnsupportedElementError) as exc:
            log.warning("line %d: unparseable SMILES %r (%s), skipping", lineno, smiles, exc)
            skipped += 1
            continue
        records.append(CaptionRecord(id=cid, smiles=smiles, description=description, task=task))
    return LoadResult(records=records, skipped=skipped, total_rows=total)


def write_dataset(path, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(HEADER) + "\n")
        for r in records:
            for text in (r.id, r.smiles, r.description):
                if "\t" in text or "\n" in text:
                    raise ValueError(f"field {text!r} contains a tab or newline")
            fh.write(f"{r.id}\t{r.smiles}\t{r.description}\n")


@dataclass
class LengthBuckets:
    boundaries: tuple
    short: list = field(default_factory=list)
    medium: list = field(default_factory=list)
    long: list = field(default_factory=list)

    def sizes(self) -> tuple:
        return (len(self.short), len(self.medium), len(self.long))


def split_by_length(records, boundaries: tuple = LENGTH_BOUNDARIES) -> LengthBuckets:
    """Bucket by description word count: short <= b0 < medium <= b1 < long."""
    b0, b1 = boundaries
    buckets = LengthBuckets(boundaries=boundaries)
    for r in records:
        n_words = len(r.description.split())
        if n_words <= b0:
            buckets.short.append(r)
        elif n_words <= b1:
            buckets.medium.append(r)
        else:
            buckets.long.append(r)
    return buckets


# ---------------------------------------------------------------------------
# synthetic corpus (tests and demos; real corpora are user-supplied)
# ---------------------------------------------------------------------------

_COUNTS = ("one", "two", "three", "four", "five", "six", "seven", "eight", "nine")


def _synthetic_pool() -> list:
    pool = []
    for n in range(2, 9):
        pool.append((f"{'C' * n}", f"a saturated linear chain of {_COUNTS[n - 1]} carbon atoms"))
    for n in range(2, 8):
        pool.append((f"{'C' * n}O",
                     f"an alcohol with a hydroxyl group ending a chain of {_COUNTS[n - 1]} carbons"))
    for n in range(2, 7):
        pool.append((f"{'C' * n}N",
                     f"a primary amine attached to {_COUNTS[n - 1]} connected carbon atoms"))
    for n in range(3, 9):
        pool.append((f"C1{'C' * (n - 2)}C1",
                     f"a carbocycle joining {_COUNTS[n - 1]} carbon atoms into one ring"))
    pool += [
        ("CC(=O)O", "acetic acid bearing a single carboxylic acid group"),
        ("CCC(=O)O", "propionic acid with one carboxylic acid group"),
        ("CC(=O)N", "an amide formed from acetic acid and ammonia"),
        ("C=C", "the simplest alkene with one double bond"),
        ("C#C", "the simplest alkyne with one triple bond"),
        ("CC=O", "an aldehyde carrying a terminal carbonyl group"),
        ("CCCl", "a chloride substituent on a two carbon chain"),
        ("CCBr", "a bromide substituent on a two carbon chain"),
        ("CCI", "an iodide substituent on a two carbon chain"),
        ("CCF", "a fluoride substituent on a two carbon chain"),
        ("c1ccccc1", "an aromatic ring of six carbon atoms"),
        ("c1ccncc1", "an aromatic six membered ring holding one nitrogen atom"),
        ("c1ccoc1", "a five membered aromatic ring containing one oxygen"),
        ("c1ccsc1", "a five membered aromatic ring containing one sulfur"),
        ("Cc1ccccc1", "a methyl group attached to an aromatic carbon ring"),
        ("[NH4+]", "an ammonium cation carrying one positive charge"),
        ("C[O-]", "a methoxide anion carrying one negative charge"),
        ("OCC(O)CO", "a triol with hydroxyl groups on three carbons"),
        ("CSC", "a thioether bridging two methyl groups"),
        ("COC", "an ether linking two methyl groups through oxygen"),
    ]
    return pool


def generate_synthetic_dataset(n: int, seed: int = 0, task: str = "caption") -> list:
    """Deterministically sample n distinct SMILES/caption pairs."""
    pool = _synthetic_pool()
    if n > len(pool):
        raise ValueError(f"synthetic pool holds {len(pool)} molecules, requested {n}")
    rng = np.random.default_rng(seed)
    picks = rng.permutation(len(pool))[:n]
    return [CaptionRecord(id=f"syn-{i:04d}", smiles=pool[p][0], description=pool[p][1], task=task)
            for i, p in enumerate(sorted(picks))]

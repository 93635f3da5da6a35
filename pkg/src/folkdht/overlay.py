"""Simulated DHT storage layer.

The overlay is a flat key-value space. Keys are 160-bit digests derived
from a name and a block type code; values are blocks holding one-bit
tokens. A token is a (target, writer_nonce) pair; the weight of a target
inside a block is the number of distinct nonces recorded for it. Writes
are therefore commutative and idempotent, which is what makes concurrent
maintenance well defined.

Every counted primitive (put, get, remove, ensure) models exactly one
network lookup, no matter how many tokens ride along in a batched put.
Inspection helpers prefixed with ``peek`` or used for dumping bypass the
accounting; they model offline measurement, not protocol traffic.

The store is thread-safe: a single lock serializes block mutations and
the lookup counter, so per-key behavior is as if operations ran one at a
time.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Iterator, NamedTuple

from .errors import DecodeError, ValidationError

KEY_BITS = 160


class BlockType(IntEnum):
    """The four block families addressable per name."""

    RESOURCE_TAGS = 1   # keyed by resource: tags applied to it, with weights
    TAG_RESOURCES = 2   # keyed by tag: resources carrying it, with weights
    TAG_NEIGHBORS = 3   # keyed by tag: related tags, with arc weights
    RESOURCE_URI = 4    # keyed by resource: its URI (single target)


@dataclass(frozen=True)
class OverlayKey:
    """Address of a block: digest plus the type code that derived it."""

    digest: bytes
    block_type: BlockType

    @property
    def hex(self) -> str:
        return self.digest.hex()


def derive_key(name: str, block_type: BlockType | int) -> OverlayKey:
    """Hash ``name`` and a type code into a block address.

    The digest input is the UTF-8 bytes of the name, a ``|`` separator and
    the ASCII digit of the type code, e.g. ``rock|2`` for the block listing
    the resources tagged "rock".
    """
    bt = BlockType(block_type)
    raw = name.encode("utf-8") + b"|" + str(int(bt)).encode("ascii")
    return OverlayKey(hashlib.sha1(raw).digest(), bt)


@dataclass(frozen=True)
class Token:
    """One-bit write: a target name plus the writer's unique nonce."""

    target: str
    nonce: str


class BlockContent(NamedTuple):
    """Result of a counted get: ranked entries plus the true target count."""

    entries: list[tuple[str, int]]
    total: int


class Block:
    """Token storage for a single key."""

    __slots__ = ("block_type", "_targets", "_nonce_index")

    def __init__(self, block_type: BlockType) -> None:
        self.block_type = block_type
        # target -> nonce set; insertion ordered by first sighting, which
        # keeps candidate iteration deterministic across processes.
        self._targets: dict[str, set[str]] = {}
        self._nonce_index: dict[str, str] = {}

    def add(self, token: Token) -> None:
        known = self._nonce_index.get(token.nonce)
        if known is not None:
            if known != token.target:
                raise ValidationError(
                    f"nonce {token.nonce!r} reused for a different target"
                )
            return  # idempotent re-put
        self._nonce_index[token.nonce] = token.target
        self._targets.setdefault(token.target, set()).add(token.nonce)

    def discard_nonce(self, nonce: str) -> bool:
        target = self._nonce_index.pop(nonce, None)
        if target is None:
            return False
        nonces = self._targets[target]
        nonces.discard(nonce)
        if not nonces:
            del self._targets[target]
        return True

    def weights(self) -> dict[str, int]:
        return {t: len(n) for t, n in self._targets.items()}

    def target_count(self) -> int:
        return len(self._targets)


@dataclass
class OverlayStats:
    """Lookup accounting. ``lookup_count`` equals the sum of the breakdown."""

    lookup_count: int = 0
    by_operation: dict[str, int] = field(default_factory=dict)


def _ranked(weights: dict[str, int]) -> list[tuple[str, int]]:
    return sorted(weights.items(), key=lambda kv: (-kv[1], kv[0]))


class OverlayStore:
    """In-process stand-in for the distributed hash table."""

    def __init__(self) -> None:
        self._blocks: dict[OverlayKey, Block] = {}
        self._lock = threading.RLock()
        self._stats = OverlayStats()

    # -- counted primitives: one lookup each ---------------------------------

    def put_token(self, key: OverlayKey, token: Token) -> None:
        self.put_tokens(key, (token,))

    def put_tokens(self, key: OverlayKey, tokens: Iterable[Token]) -> None:
        """Write a batch of tokens to one block in a single lookup.

        An empty batch still pays the lookup and materializes the block.
        """
        with self._lock:
            self._count("put")
            block = self._blocks.get(key)
            if block is None:
                block = self._blocks[key] = Block(key.block_type)
            for token in tokens:
                block.add(token)

    def ensure_block(self, key: OverlayKey) -> None:
        """Materialize an empty block (registration write)."""
        with self._lock:
            self._count("ensure")
            if key not in self._blocks:
                self._blocks[key] = Block(key.block_type)

    def get_block(self, key: OverlayKey, cap: int | None = None) -> BlockContent:
        """Read a block: entries ranked by weight (descending, then name).

        ``cap`` limits how many entries come back, but the reported total
        is always the true distinct-target count. An absent key reads as
        an empty block.
        """
        if cap is not None and cap < 1:
            raise ValidationError("get cap must be at least 1")
        with self._lock:
            self._count("get")
            block = self._blocks.get(key)
            if block is None:
                return BlockContent([], 0)
            entries = _ranked(block.weights())
            total = len(entries)
            if cap is not None:
                entries = entries[:cap]
            return BlockContent(entries, total)

    def read_block_weights(self, key: OverlayKey) -> dict[str, int] | None:
        """Counted raw read: target->weight, or None if the block is absent.

        Iteration order of the result is the first-sighting order of the
        targets, which is deterministic for a deterministic write history.
        """
        with self._lock:
            self._count("get")
            block = self._blocks.get(key)
            if block is None:
                return None
            return block.weights()

    def remove_token(self, key: OverlayKey, nonce: str) -> bool:
        with self._lock:
            self._count("remove")
            block = self._blocks.get(key)
            if block is None:
                return False
            return block.discard_nonce(nonce)

    # -- accounting -----------------------------------------------------------

    def _count(self, operation: str) -> None:
        self._stats.lookup_count += 1
        ops = self._stats.by_operation
        ops[operation] = ops.get(operation, 0) + 1

    def read_stats(self) -> OverlayStats:
        with self._lock:
            return OverlayStats(
                self._stats.lookup_count, dict(self._stats.by_operation)
            )

    def reset_stats(self) -> None:
        with self._lock:
            self._stats = OverlayStats()

    # -- uncounted inspection (offline measurement, not protocol traffic) -----

    def has_block(self, key: OverlayKey) -> bool:
        with self._lock:
            return key in self._blocks

    def peek_weights(self, key: OverlayKey) -> dict[str, int] | None:
        with self._lock:
            block = self._blocks.get(key)
            return None if block is None else block.weights()

    def block_count(self) -> int:
        with self._lock:
            return len(self._blocks)

    def iter_blocks(self) -> Iterator[tuple[OverlayKey, BlockType, dict[str, int]]]:
        with self._lock:
            snapshot = [
                (key, block.block_type, block.weights())
                for key, block in self._blocks.items()
            ]
        yield from snapshot

    def dump_records(self) -> list[dict]:
        """Serializable view of every block, sorted by key digest."""
        records = []
        for key, block_type, weights in self.iter_blocks():
            records.append(
                {
                    "key_hex": key.hex,
                    "type": int(block_type),
                    "entries": [
                        {"target": t, "weight": w} for t, w in _ranked(weights)
                    ],
                }
            )
        records.sort(key=lambda rec: rec["key_hex"])
        return records

    @classmethod
    def from_dump_records(cls, records: Iterable[dict]) -> "OverlayStore":
        """Rebuild a store from dump records (fresh synthetic nonces)."""
        store = cls()
        counter = 0
        for rec in records:
            try:
                block_type = BlockType(rec["type"])
                digest = bytes.fromhex(rec["key_hex"])
                entries = rec["entries"]
            except (KeyError, ValueError, TypeError) as exc:
                raise DecodeError(f"malformed overlay record: {rec!r}") from exc
            if len(digest) * 8 != KEY_BITS:
                raise DecodeError(f"bad key width in record {rec['key_hex']!r}")
            key = OverlayKey(digest, block_type)
            tokens = []
            for entry in entries:
                target, weight = entry["target"], int(entry["weight"])
                if weight < 1:
                    raise DecodeError(f"non-positive weight in record for {target!r}")
                for _ in range(weight):
                    tokens.append(Token(target, f"load{counter}"))
                    counter += 1
            store.put_tokens(key, tokens)
        store.reset_stats()
        return store

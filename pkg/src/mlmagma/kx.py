"""Key exchange over the magma power structure, with a binary wire codec.

Both parties agree on a public base vector a; each picks a secret
exponent and publishes its power of a.  The shared key is the peer's
public value raised to the own secret, i.e. a^(m*n), which both sides
reach because (a^m)^n = (a^n)^m under the power identity.

An additive variant deriving a^(m+n) exists behind an explicit flag for
study only: a^(m+n) = a^m * a^n is computable from the two public
values alone, so it offers no secrecy.

Wire format (big endian): magic "MLKX", version 0x01, kind byte, then

  kind 0x01 parameter-announce: p (8), dim (1), coefficient count (1),
      coefficients (8 each), base components (8 each);
  kind 0x02 public-value: dim (1), components (8 each).

Messages are sent over any ordered reliable byte stream; no encryption
or authentication is attempted.
"""

from __future__ import annotations

import json
import random
import socket
import struct
import threading
from dataclasses import dataclass

from .field import PrimeModulus
from .magma import identity, mul, vector
from .power import pow_fast

MAGIC = b"MLKX"
VERSION = 1
KIND_PARAMS = 0x01
KIND_PUBLIC = 0x02

MODE_MULTIPLICATIVE = "multiplicative"
MODE_ADDITIVE = "additive"   # insecure, for study
MODES = (MODE_MULTIPLICATIVE, MODE_ADDITIVE)


class KxError(Exception):
    """Base error for the key-exchange subsystem."""


class KxDecodeError(KxError):
    """Base class for wire decoding failures."""


class BadMagicError(KxDecodeError):
    pass


class BadVersionError(KxDecodeError):
    pass


class TruncatedMessageError(KxDecodeError):
    pass


class NonCanonicalValueError(KxDecodeError):
    pass


class KxSessionError(KxError):
    """Session aborted: timeout, malformed peer message, or mismatch."""


@dataclass(frozen=True)
class KxPublicParams:
    params: object        # Params3 | Params4
    base: object          # Vector3 | Vector4

    def __post_init__(self):
        if self.base.modulus != self.params.modulus:
            raise ValueError("base and params must share one modulus")
        if self.base.dim != self.params.dim:
            raise ValueError("base and params must share one dimension")
        if self.base == identity(self.base.dim, self.base.modulus):
            raise ValueError("base must differ from the identity vector")

    @property
    def modulus(self) -> PrimeModulus:
        return self.params.modulus

    @property
    def dim(self) -> int:
        return self.base.dim


@dataclass(frozen=True)
class KxKeypair:
    secret: int
    public: object


def keygen(pub: KxPublicParams, exponent_bits: int = 64,
           rng: random.Random | None = None) -> KxKeypair:
    """Secret m uniform in [2^(bits-1), 2^bits); public a^m.

    The rare draw whose public value is the identity is resampled: an
    identity public carries no key material and peers reject it.
    """
    if exponent_bits < 2:
        raise ValueError("exponent_bits must be at least 2")
    rng = rng if rng is not None else random.SystemRandom()
    e = identity(pub.dim, pub.modulus)
    for _ in range(256):
        m = rng.randrange(1 << (exponent_bits - 1), 1 << exponent_bits)
        public = pow_fast(pub.base, m, pub.params)
        if public != e:
            return KxKeypair(m, public)
    raise KxError("could not draw a secret with a non-identity public value")


def derive_shared(own: KxKeypair, peer_public, pub: KxPublicParams,
                  mode: str = MODE_MULTIPLICATIVE):
    """Shared key from the peer's public value.

    Multiplicative (default): (peer_public)^secret = a^(m*n).
    Additive (insecure): a^(m+n) = own_public * peer_public, included
    only to study the variant; no secret input is actually needed.
    """
    if peer_public.modulus != pub.modulus or peer_public.dim != pub.dim:
        raise KxSessionError("peer public value has mismatched field or dimension")
    if peer_public == identity(pub.dim, pub.modulus):
        raise KxSessionError("peer public value is the identity")
    if mode == MODE_MULTIPLICATIVE:
        return pow_fast(peer_public, own.secret, pub.params)
    if mode == MODE_ADDITIVE:
        return mul(own.public, peer_public, pub.params)
    raise ValueError(f"mode must be one of {MODES}")


# ---------------------------------------------------------------------------
# wire codec

@dataclass(frozen=True)
class ParamsAnnounce:
    p: int
    dim: int
    coefficients: tuple[int, ...]
    base: tuple[int, ...]

    @property
    def kind(self) -> int:
        return KIND_PARAMS


@dataclass(frozen=True)
class PublicValue:
    dim: int
    components: tuple[int, ...]

    @property
    def kind(self) -> int:
        return KIND_PUBLIC


@dataclass(frozen=True)
class KxMessage:
    version: int
    body: ParamsAnnounce | PublicValue

    @property
    def kind(self) -> int:
        return self.body.kind


def announce_for(pub: KxPublicParams) -> KxMessage:
    return KxMessage(VERSION, ParamsAnnounce(
        pub.modulus.p, pub.dim, tuple(pub.params.coefficients),
        tuple(pub.base.components)))


def public_message(value) -> KxMessage:
    return KxMessage(VERSION, PublicValue(value.dim, tuple(value.components)))


def encode_message(msg: KxMessage) -> bytes:
    head = MAGIC + bytes([msg.version, msg.kind])
    body = msg.body
    if isinstance(body, ParamsAnnounce):
        out = head + struct.pack(">QBB", body.p, body.dim, len(body.coefficients))
        out += b"".join(struct.pack(">Q", c) for c in body.coefficients)
        out += b"".join(struct.pack(">Q", c) for c in body.base)
        return out
    if isinstance(body, PublicValue):
        out = head + bytes([body.dim])
        out += b"".join(struct.pack(">Q", c) for c in body.components)
        return out
    raise TypeError(f"unknown message body {type(body).__name__}")


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.off = 0

    def take(self, n: int) -> bytes:
        if self.off + n > len(self.data):
            raise TruncatedMessageError(
                f"message truncated: wanted {n} bytes at offset {self.off}, "
                f"have {len(self.data) - self.off}")
        out = self.data[self.off:self.off + n]
        self.off += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u64(self) -> int:
        return struct.unpack(">Q", self.take(8))[0]


def _check_canonical(values, p: int) -> None:
    for v in values:
        if v >= p:
            raise NonCanonicalValueError(f"residue {v} not below modulus {p}")


def decode_message(data: bytes, expected_p: int | None = None) -> KxMessage:
    """Decode one message; canonicality of public values needs expected_p."""
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise BadMagicError("bad magic")
    version = r.u8()
    if version != VERSION:
        raise BadVersionError(f"unsupported version {version}")
    kind = r.u8()
    if kind == KIND_PARAMS:
        p = r.u64()
        dim = r.u8()
        count = r.u8()
        if dim not in (3, 4) or count != (5 if dim == 3 else 9):
            raise KxDecodeError(f"inconsistent dim {dim} / coefficient count {count}")
        coefficients = tuple(r.u64() for _ in range(count))
        base = tuple(r.u64() for _ in range(dim))
        _check_canonical(coefficients + base, p)
        if expected_p is not None and p != expected_p:
            raise KxDecodeError(f"announced modulus {p} != expected {expected_p}")
        msg = KxMessage(version, ParamsAnnounce(p, dim, coefficients, base))
    elif kind == KIND_PUBLIC:
        dim = r.u8()
        if dim not in (3, 4):
            raise KxDecodeError(f"unsupported dimension {dim}")
        components = tuple(r.u64() for _ in range(dim))
        if expected_p is not None:
            _check_canonical(components, expected_p)
        msg = KxMessage(version, PublicValue(dim, components))
    else:
        raise KxDecodeError(f"unknown message kind {kind}")
    if r.off != len(data):
        raise KxDecodeError(f"{len(data) - r.off} trailing bytes after message")
    return msg


def _params_message_length(dim: int) -> int:
    count = 5 if dim == 3 else 9
    return 8 + 1 + 1 + 8 * count + 8 * dim


# ---------------------------------------------------------------------------
# local simulation

@dataclass
class LocalExchange:
    pub: KxPublicParams
    alice: KxKeypair
    bob: KxKeypair
    shared_alice: object
    shared_bob: object
    mode: str

    @property
    def match(self) -> bool:
        return self.shared_alice == self.shared_bob

    def transcript(self) -> dict:
        return {
            "p": self.pub.modulus.p,
            "dim": self.pub.dim,
            "params": list(self.pub.params.coefficients),
            "base": list(self.pub.base.components),
            "mode": self.mode,
            "alice_public": list(self.alice.public.components),
            "bob_public": list(self.bob.public.components),
            "shared_alice": list(self.shared_alice.components),
            "shared_bob": list(self.shared_bob.components),
            "match": self.match,
        }


def run_local_exchange(pub: KxPublicParams, exponent_bits: int = 64,
                       rng: random.Random | None = None,
                       mode: str = MODE_MULTIPLICATIVE) -> LocalExchange:
    """Simulate both roles in process and compare the derived keys."""
    rng = rng if rng is not None else random.SystemRandom()
    alice = keygen(pub, exponent_bits, rng)
    bob = keygen(pub, exponent_bits, rng)
    return LocalExchange(
        pub, alice, bob,
        derive_shared(alice, bob.public, pub, mode),
        derive_shared(bob, alice.public, pub, mode),
        mode,
    )


# ---------------------------------------------------------------------------
# network sessions

ROLE_INITIATOR = "initiator"
ROLE_RESPONDER = "responder"


def _recv_exact(sock, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        try:
            chunk = sock.recv(n - len(buf))
        except TimeoutError as exc:
            raise KxSessionError("timed out waiting for peer data") from exc
        if not chunk:
            raise KxSessionError("connection closed mid-message")
        buf.extend(chunk)
    return bytes(buf)


def _recv_message(sock, expected_p: int | None = None) -> KxMessage:
    head = _recv_exact(sock, 6)
    if head[:4] != MAGIC:
        raise KxSessionError(f"aborted: bad magic {head[:4]!r}")
    version, kind = head[4], head[5]
    if version != VERSION:
        raise KxSessionError(f"aborted: unsupported version {version}")
    if kind == KIND_PARAMS:
        fixed = _recv_exact(sock, 10)
        dim = fixed[8]
        if dim not in (3, 4):
            raise KxSessionError(f"aborted: unsupported dimension {dim}")
        rest = _recv_exact(sock, _params_message_length(dim) - 10)
        data = head + fixed + rest
    elif kind == KIND_PUBLIC:
        dim_byte = _recv_exact(sock, 1)
        dim = dim_byte[0]
        if dim not in (3, 4):
            raise KxSessionError(f"aborted: unsupported dimension {dim}")
        data = head + dim_byte + _recv_exact(sock, 8 * dim)
    else:
        raise KxSessionError(f"aborted: unknown message kind {kind}")
    try:
        return decode_message(data, expected_p)
    except KxDecodeError as exc:
        raise KxSessionError(f"aborted: {exc}") from exc


@dataclass
class SessionResult:
    role: str
    keypair: KxKeypair
    peer_public: object
    shared: object

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "public": list(self.keypair.public.components),
            "peer_public": list(self.peer_public.components),
            "shared": list(self.shared.components),
        }


def run_session(role: str, sock, pub: KxPublicParams, exponent_bits: int = 64,
                rng: random.Random | None = None, timeout: float = 10.0,
                mode: str = MODE_MULTIPLICATIVE) -> SessionResult:
    """Run one exchange over an ordered reliable byte stream.

    The initiator announces parameters and its public value; the
    responder checks the announcement against its own configuration,
    answers with its public value, and both sides derive the key.
    """
    if role not in (ROLE_INITIATOR, ROLE_RESPONDER):
        raise ValueError(f"role must be {ROLE_INITIATOR!r} or {ROLE_RESPONDER!r}")
    if timeout is not None:
        sock.settimeout(timeout)
    own = keygen(pub, exponent_bits, rng)
    p = pub.modulus.p
    if role == ROLE_INITIATOR:
        sock.sendall(encode_message(announce_for(pub)))
        sock.sendall(encode_message(public_message(own.public)))
        reply = _recv_message(sock, expected_p=p)
        if reply.kind != KIND_PUBLIC:
            raise KxSessionError("aborted: expected a public value reply")
        peer = vector(reply.body.components, pub.modulus)
    else:
        announce = _recv_message(sock, expected_p=p)
        if announce.kind != KIND_PARAMS:
            raise KxSessionError("aborted: expected a parameter announce")
        body = announce.body
        if (body.dim != pub.dim
                or body.coefficients != tuple(pub.params.coefficients)
                or body.base != tuple(pub.base.components)):
            raise KxSessionError("aborted: parameter mismatch with peer")
        first = _recv_message(sock, expected_p=p)
        if first.kind != KIND_PUBLIC:
            raise KxSessionError("aborted: expected the initiator public value")
        peer = vector(first.body.components, pub.modulus)
        sock.sendall(encode_message(public_message(own.public)))
    shared = derive_shared(own, peer, pub, mode)
    return SessionResult(role, own, peer, shared)


def make_listener(host: str, port: int) -> socket.socket:
    """Bind a listening socket; port 0 picks a free one."""
    return socket.create_server((host, port))


def serve(listener: socket.socket, pub: KxPublicParams, exponent_bits: int = 64,
          *, once: bool = False, timeout: float = 10.0,
          mode: str = MODE_MULTIPLICATIVE, on_result=None) -> None:
    """Accept connections and answer one exchange per connection.

    Sessions are independent; each runs in its own thread.  on_result
    receives a SessionResult per completed exchange, or the
    KxSessionError when one aborts.
    """
    def handle(conn):
        with conn:
            try:
                result = run_session(ROLE_RESPONDER, conn, pub, exponent_bits,
                                     timeout=timeout, mode=mode)
                if on_result is not None:
                    on_result(result)
            except KxSessionError as exc:
                if on_result is not None:
                    on_result(exc)

    with listener:
        while True:
            conn, _ = listener.accept()
            if once:
                handle(conn)
                return
            threading.Thread(target=handle, args=(conn,), daemon=True).start()


def connect(host: str, port: int, pub: KxPublicParams, exponent_bits: int = 64,
            *, timeout: float = 10.0,
            mode: str = MODE_MULTIPLICATIVE) -> SessionResult:
    """Dial a responder and run one exchange as the initiator."""
    with socket.create_connection((host, port), timeout=timeout) as sock:
        return run_session(ROLE_INITIATOR, sock, pub, exponent_bits,
                           timeout=timeout, mode=mode)


def transcript_json(result: SessionResult) -> str:
    return json.dumps(result.to_dict(), sort_keys=True)

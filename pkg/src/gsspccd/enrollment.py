"""GM-side Join: tuple sampling, root extraction, certificates and the registry."""

import re
from dataclasses import dataclass

from . import kvfile
from .encoding import encode_ints, encode_str
from .errors import FormatError, GenerationError, ParameterError, UniquenessError
from .grouppk import (
    GroupPublicKey,
    GroupSecretKey,
    gm_certify,
    gm_check_certificate,
    linear_check,
    solve_last,
)
from .numtheory import is_unit, sample_unit

MEMBER_ID_RE = re.compile(r"[A-Za-z0-9_-]{1,64}")


def check_member_id(member_id: str) -> None:
    if not isinstance(member_id, str) or not MEMBER_ID_RE.fullmatch(member_id):
        raise ParameterError(f"malformed member id {member_id!r}")


@dataclass(frozen=True)
class MemberCredential:
    member_id: str
    public: tuple[int, ...]
    secret: tuple[int, ...]
    certificate: int


@dataclass(frozen=True)
class RegistryEntry:
    member_id: str
    public: tuple[int, ...]
    certificate: int


@dataclass(frozen=True)
class Registry:
    entries: tuple[RegistryEntry, ...] = ()

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, member_id):
        return any(e.member_id == member_id for e in self.entries)

    def collides(self, public) -> bool:
        """True if any coordinate equals the same coordinate of a registered tuple."""
        return any(
            a == b for e in self.entries for a, b in zip(e.public, public)
        )

    def with_entry(self, entry: RegistryEntry) -> "Registry":
        if entry.member_id in self:
            raise UniquenessError(f"member {entry.member_id!r} already holds a credential")
        if self.collides(entry.public):
            raise UniquenessError("tuple shares a coordinate with a registered member")
        return Registry(self.entries + (entry,))


def certificate_payload(member_id: str, public) -> bytes:
    return encode_str(member_id) + encode_ints([len(public), *public])


def issue_certificate(pk: GroupPublicKey, sk: GroupSecretKey, member_id: str, public) -> int:
    check_member_id(member_id)
    if not linear_check(pk, public):
        raise ParameterError("tuple does not satisfy the linearized public key")
    return gm_certify(pk, sk, "member", certificate_payload(member_id, public))


def verify_certificate(pk: GroupPublicKey, member_id: str, public, cert: int) -> bool:
    check_member_id(member_id)
    if len(public) != pk.k or any(not 0 <= x < pk.n for x in public):
        return False
    return gm_check_certificate(pk, "member", certificate_payload(member_id, public), cert)


def extract_root(X: int, j: int, sk: GroupSecretKey, n: int) -> int:
    """e_j-th root of X modulo n, using the factorization (j is 0-based)."""
    if not is_unit(X, n):
        raise ParameterError(f"{X} is not a unit modulo n")
    return pow(X, sk.inv_exps[j], n)


def sample_tuple(pk: GroupPublicKey, rng, registry: Registry = Registry(), max_tries: int = 1000):
    """Random unit tuple on the linearized relation, coordinate-disjoint from ``registry``."""
    for _ in range(max_tries):
        head = [sample_unit(pk.n, rng) for _ in range(pk.k - 1)]
        last = solve_last(pk, head)
        public = (*head, last)
        if not is_unit(last, pk.n) or registry.collides(public):
            continue
        return public
    raise GenerationError("could not sample a fresh member tuple")


def issue_credential(
    pk: GroupPublicKey,
    sk: GroupSecretKey,
    member_id: str,
    registry: Registry,
    rng,
    *,
    public=None,
) -> tuple[MemberCredential, Registry]:
    """Enroll ``member_id``; ``public`` pins the tuple instead of sampling it."""
    check_member_id(member_id)
    if member_id in registry:
        raise UniquenessError(f"member {member_id!r} already holds a credential")
    if public is None:
        public = sample_tuple(pk, rng, registry)
    else:
        public = tuple(public)
        if len(public) != pk.k or any(not is_unit(x, pk.n) for x in public):
            raise ParameterError("forced tuple must consist of k units mod n")
        if not linear_check(pk, public):
            raise ParameterError("forced tuple does not satisfy the linearized public key")
    secret = tuple(extract_root(x, j, sk, pk.n) for j, x in enumerate(public))
    cert = issue_certificate(pk, sk, member_id, public)
    registry = registry.with_entry(RegistryEntry(member_id, public, cert))
    return MemberCredential(member_id, public, secret, cert), registry


def open_lookup(registry: Registry, public) -> str | None:
    public = tuple(public)
    for entry in registry:
        if entry.public == public:
            return entry.member_id
    return None


REGISTRY_FORMAT = "gsspccd-reg-v1"
CREDENTIAL_FORMAT = "gsspccd-cred-v1"


def dump_registry(registry: Registry) -> str:
    lines = [f"format: {REGISTRY_FORMAT}"]
    lines += [
        f"{e.member_id};{kvfile.fmt_ints(e.public)};{kvfile.fmt_int(e.certificate)}"
        for e in registry
    ]
    return "\n".join(lines) + "\n"


def load_registry(text: str) -> Registry:
    header, *rows = kvfile.split_lines(text)
    if header != f"format: {REGISTRY_FORMAT}":
        raise FormatError(f"not a {REGISTRY_FORMAT} file")
    registry = Registry()
    for row in rows:
        parts = row.split(";")
        if len(parts) != 3 or not MEMBER_ID_RE.fullmatch(parts[0]):
            raise FormatError(f"malformed registry row {row!r}")
        entry = RegistryEntry(parts[0], kvfile.parse_ints(parts[1]), kvfile.parse_int(parts[2]))
        if registry.entries and len(entry.public) != len(registry.entries[0].public):
            raise FormatError("registry rows disagree on tuple length")
        try:
            registry = registry.with_entry(entry)
        except UniquenessError as exc:
            raise FormatError(f"registry invariant broken: {exc}") from exc
    return registry


def dump_credential(cred: MemberCredential) -> str:
    return kvfile.dump(CREDENTIAL_FORMAT, [
        ("member_id", cred.member_id),
        ("public", kvfile.fmt_ints(cred.public)),
        ("secret", kvfile.fmt_ints(cred.secret)),
        ("cert", kvfile.fmt_int(cred.certificate)),
    ])


def load_credential(text: str) -> MemberCredential:
    f = kvfile.parse(text, CREDENTIAL_FORMAT, ["member_id", "public", "secret", "cert"])
    if not MEMBER_ID_RE.fullmatch(f["member_id"]):
        raise FormatError("malformed member id")
    public, secret = kvfile.parse_ints(f["public"]), kvfile.parse_ints(f["secret"])
    if len(public) != len(secret):
        raise FormatError("public and secret tuples differ in length")
    return MemberCredential(f["member_id"], public, secret, kvfile.parse_int(f["cert"]))

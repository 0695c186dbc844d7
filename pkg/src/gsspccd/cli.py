"""Role-oriented command line: ``gsspccd <subcommand> [flags]``.

Exit status: 0 accept/success, 1 verification reject, 2 usage or parameter
error, 3 I/O or format error. Verification subcommands print ``ACCEPT`` or
``REJECT`` followed by a reason line.
"""

import argparse
import contextlib
import fcntl
import io
import os
import sys
from pathlib import Path

from . import enhanced, enrollment, grouppk, gsig, selfproof
from .errors import CannotDenyError, FormatError, GsError
from .kvfile import parse_ints, read_text, write_atomic
from .rng import HashStream, system_rng
from .spk import ChallengeOracle

EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

PK_FILE = "group.pk"
SK_FILE = "group.sk"
REGISTRY_FILE = "registry.reg"
EG_PARAMS_FILE = "eg.params"
EG_KEY_FILE = "eg.key"


class UsageError(Exception):
    pass


class Rejected(Exception):
    pass


class Session:
    """Per-invocation state: parsed flags, I/O streams and derived helpers."""

    def __init__(self, args, stdin: bytes, env, out):
        self.args = args
        self.stdin = stdin
        self.out = out
        home = args.home or env.get("GSSPCCD_HOME") or "."
        self.home = Path(home)
        self._rng = None

    @property
    def rng(self):
        if self._rng is None:
            if self.args.seed is not None:
                try:
                    self._rng = HashStream(bytes.fromhex(self.args.seed))
                except ValueError as exc:
                    raise UsageError("--seed must be hex") from exc
            else:
                self._rng = system_rng()
        return self._rng

    @property
    def oracle(self) -> ChallengeOracle:
        forced = self.args.force_challenge
        if forced is None:
            return ChallengeOracle()
        self.require_insecure("--force-challenge")
        return ChallengeOracle(forced)

    def require_insecure(self, flag):
        if not self.args.insecure_test_mode:
            raise UsageError(f"{flag} requires --insecure-test-mode")

    def path(self, name) -> Path:
        return self.home / name

    def load(self, path, loader):
        return loader(read_text(path))

    def pk(self):
        return self.load(self.path(PK_FILE), grouppk.load_public_key)

    def sk(self):
        return self.load(self.path(SK_FILE), grouppk.load_secret_key)

    def registry(self):
        return self.load(self.path(REGISTRY_FILE), enrollment.load_registry)

    def eg(self):
        return self.load(self.path(EG_PARAMS_FILE), enhanced.load_params)

    def message(self) -> bytes:
        src = self.args.message
        if src == "-":
            return self.stdin
        return Path(src).read_bytes()

    def nonce(self) -> bytes:
        try:
            return bytes.fromhex(self.args.nonce)
        except ValueError as exc:
            raise UsageError("--nonce must be hex") from exc

    def say(self, *lines):
        for line in lines:
            print(line, file=self.out)

    def verdict(self, ok: bool, accept_reason: str, reject_reason: str) -> int:
        if ok:
            self.say("ACCEPT", accept_reason)
            return EXIT_OK
        self.say("REJECT", reject_reason)
        return EXIT_REJECT


@contextlib.contextmanager
def registry_lock(home: Path):
    with open(home / (REGISTRY_FILE + ".lock"), "w") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def _int_list(text):
    try:
        return parse_ints(text)
    except FormatError as exc:
        raise UsageError(str(exc)) from exc


def cmd_gm_setup(s: Session) -> int:
    a = s.args
    s.home.mkdir(parents=True, exist_ok=True)
    if s.path(PK_FILE).exists() and not a.overwrite:
        raise UsageError(f"{s.path(PK_FILE)} exists (use --overwrite)")
    if a.fixture == "paper":
        pk, sk = grouppk.worked_example()
    else:
        pk, sk = grouppk.setup(a.k, a.modulus_bits, a.exponent_bits, a.challenge_bits, s.rng,
                               insecure=a.insecure_test_mode)
    with registry_lock(s.home):
        write_atomic(s.path(PK_FILE), grouppk.dump_public_key(pk))
        write_atomic(s.path(SK_FILE), grouppk.dump_secret_key(sk))
        write_atomic(s.path(REGISTRY_FILE), enrollment.dump_registry(enrollment.Registry()))
    s.say(f"group key written to {s.path(PK_FILE)} (k={pk.k}, {pk.n.bit_length()}-bit modulus)")
    if not pk.is_sound:
        s.say("warning: exponents do not exceed the challenge space; key is not sound")
    return EXIT_OK


def cmd_gm_join(s: Session) -> int:
    a = s.args
    public = None
    if a.force_tuple is not None:
        s.require_insecure("--force-tuple")
        public = _int_list(a.force_tuple)
    pk, sk = s.pk(), s.sk()
    with registry_lock(s.home):
        registry = s.registry()
        cred, registry = enrollment.issue_credential(pk, sk, a.member_id, registry, s.rng,
                                                     public=public)
        write_atomic(a.out, enrollment.dump_credential(cred))
        write_atomic(s.path(REGISTRY_FILE), enrollment.dump_registry(registry))
    s.say(f"enrolled {cred.member_id}; credential written to {a.out}")
    return EXIT_OK


def cmd_gm_open(s: Session) -> int:
    sig = s.load(s.args.sig, gsig.load_signature)
    who = gsig.open(s.registry(), sig)
    if who is None:
        s.say("NOT-FOUND", "signature tuple is not registered")
        return EXIT_REJECT
    s.say(who)
    return EXIT_OK


def cmd_gm_deny_token(s: Session) -> int:
    a = s.args
    bundle = s.load(a.bundle, enhanced.load_bundle)
    key = s.load(s.path(EG_KEY_FILE), enhanced.load_trace_key)
    token = enhanced.deny_token(s.eg(), key, bundle, a.coord, s.pk(), s.sk())
    write_atomic(a.out, enhanced.dump_token(token))
    s.say(f"token for coordinate {a.coord} written to {a.out}")
    return EXIT_OK


def cmd_member_sign(s: Session) -> int:
    a = s.args
    nonces = None
    if a.force_nonce is not None:
        s.require_insecure("--force-nonce")
        nonces = _int_list(a.force_nonce)
    oracle = s.oracle
    pk = s.pk()
    cred = s.load(a.cred, enrollment.load_credential)
    sig = gsig.sign(pk, cred, s.message(), oracle, s.rng, nonces=nonces)
    write_atomic(a.out, gsig.dump_signature(sig))
    s.say(f"signature written to {a.out}")
    return EXIT_OK


def cmd_member_confirm(s: Session) -> int:
    a = s.args
    oracle, nonce = s.oracle, s.nonce()
    pk = s.pk()
    cred = s.load(a.cred, enrollment.load_credential)
    contested = s.load(a.contested, gsig.load_signature)
    proof = selfproof.make_confirm(pk, cred, contested, nonce, oracle, s.rng)
    write_atomic(a.out, selfproof.dump_confirm(proof))
    s.say(f"confirm proof written to {a.out}")
    return EXIT_OK


def cmd_member_deny(s: Session) -> int:
    a = s.args
    oracle, nonce = s.oracle, s.nonce()
    pk = s.pk()
    cred = s.load(a.cred, enrollment.load_credential)
    contested = s.load(a.contested, gsig.load_signature)
    try:
        proof = selfproof.make_deny(pk, cred, contested, nonce, oracle, s.rng)
    except CannotDenyError as exc:
        raise Rejected(f"cannot deny: {exc}") from exc
    write_atomic(a.out, selfproof.dump_deny(proof))
    s.say(f"deny proof written to {a.out}")
    return EXIT_OK


def cmd_verify(s: Session) -> int:
    oracle = s.oracle
    sig = s.load(s.args.sig, gsig.load_signature)
    ok = gsig.verify(s.pk(), s.message(), sig, oracle)
    return s.verdict(ok, "valid group signature", "signature does not verify")


def cmd_verify_confirm(s: Session) -> int:
    oracle, nonce = s.oracle, s.nonce()
    contested = s.load(s.args.contested, gsig.load_signature)
    proof = s.load(s.args.proof, selfproof.load_confirm)
    ok = selfproof.verify_confirm(s.pk(), contested, proof, nonce, oracle)
    return s.verdict(ok, "prover is the signer", "confirm proof does not verify")


def cmd_verify_deny(s: Session) -> int:
    oracle, nonce = s.oracle, s.nonce()
    contested = s.load(s.args.contested, gsig.load_signature)
    proof = s.load(s.args.proof, selfproof.load_deny)
    ok = selfproof.verify_deny(s.pk(), contested, proof, nonce, oracle)
    return s.verdict(ok, f"{proof.prover_id} is not the signer", "deny proof does not verify")


def cmd_link(s: Session) -> int:
    sig_a = s.load(s.args.sig_a, gsig.load_signature)
    sig_b = s.load(s.args.sig_b, gsig.load_signature)
    return s.verdict(gsig.link(sig_a, sig_b), "signatures share a member tuple",
                     "signatures use different member tuples")


def cmd_eg_setup(s: Session) -> int:
    a = s.args
    pk = s.pk()
    if a.fixture == "toy":
        params, key = enhanced.toy_params()
        if params.P <= pk.n:
            raise UsageError(f"toy group P={params.P} does not exceed n={pk.n}")
    else:
        bits = a.bits or pk.n.bit_length() + 1
        params, key = enhanced.eg_setup(bits, pk.n, s.rng)
    write_atomic(s.path(EG_PARAMS_FILE), enhanced.dump_params(params))
    write_atomic(s.path(EG_KEY_FILE), enhanced.dump_trace_key(key))
    s.say(f"commitment group written to {s.path(EG_PARAMS_FILE)} ({params.P.bit_length()}-bit P)")
    return EXIT_OK


def cmd_eg_commit(s: Session) -> int:
    a = s.args
    cred = s.load(a.cred, enrollment.load_credential)
    bundle, reveal = enhanced.commit_tuple(s.eg(), cred.public, s.rng)
    write_atomic(a.out, enhanced.dump_bundle(bundle))
    write_atomic(a.reveal_out, enhanced.dump_reveal(reveal))
    s.say(f"bundle written to {a.out}; keep {a.reveal_out} private until confirming")
    return EXIT_OK


def cmd_eg_trace(s: Session) -> int:
    bundle = s.load(s.args.bundle, enhanced.load_bundle)
    key = s.load(s.path(EG_KEY_FILE), enhanced.load_trace_key)
    public = enhanced.trace(s.eg(), key, bundle)
    who = enrollment.open_lookup(s.registry(), public)
    s.say(",".join(map(str, public)))
    if who is None:
        s.say("NOT-FOUND")
        return EXIT_REJECT
    s.say(who)
    return EXIT_OK


def cmd_eg_reveal_verify(s: Session) -> int:
    a = s.args
    bundle = s.load(a.bundle, enhanced.load_bundle)
    reveal = s.load(a.reveal, enhanced.load_reveal)
    ok = enhanced.verify_confirm_reveal(s.eg(), bundle, reveal, _int_list(a.tuple))
    return s.verdict(ok, "reveal opens the bundle to the claimed tuple",
                     "reveal does not open the bundle to the claimed tuple")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--home", help="key directory (default $GSSPCCD_HOME or .)")
    common.add_argument("--seed", help="hex seed for a deterministic random stream")
    common.add_argument("--insecure-test-mode", action="store_true",
                        help="allow forced challenges, nonces and tuples")
    common.add_argument("--force-challenge", type=int, metavar="DECIMAL")

    parser = argparse.ArgumentParser(prog="gsspccd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("gm-setup", cmd_gm_setup, "generate the group key pair and an empty registry")
    p.add_argument("--fixture", choices=["paper"])
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--modulus-bits", type=int, default=2048)
    p.add_argument("--exponent-bits", type=int)
    p.add_argument("--challenge-bits", type=int, default=grouppk.DEFAULT_CHALLENGE_BITS)
    p.add_argument("--overwrite", action="store_true")

    p = add("gm-join", cmd_gm_join, "enroll a member and write their credential")
    p.add_argument("--member-id", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--force-tuple", metavar="X1,...,Xk")

    p = add("gm-open", cmd_gm_open, "identify the signer of a signature")
    p.add_argument("--sig", required=True)

    p = add("gm-deny-token", cmd_gm_deny_token, "issue a certified h^r token for a bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--coord", type=int, required=True, help="0-based coordinate index")
    p.add_argument("--out", required=True)

    p = add("member-sign", cmd_member_sign, "sign a message")
    p.add_argument("--cred", required=True)
    p.add_argument("--message", required=True, help="message file, or - for stdin")
    p.add_argument("--out", required=True)
    p.add_argument("--force-nonce", metavar="R1,...,Rk")

    for name, func, help_ in [
        ("member-confirm", cmd_member_confirm, "prove authorship of a signature"),
        ("member-deny", cmd_member_deny, "prove non-authorship of a signature"),
    ]:
        p = add(name, func, help_)
        p.add_argument("--cred", required=True)
        p.add_argument("--contested", required=True)
        p.add_argument("--nonce", required=True, help="verifier nonce, hex")
        p.add_argument("--out", required=True)

    p = add("verify", cmd_verify, "verify a group signature")
    p.add_argument("--sig", required=True)
    p.add_argument("--message", required=True, help="message file, or - for stdin")

    for name, func, help_ in [
        ("verify-confirm", cmd_verify_confirm, "check a confirm proof"),
        ("verify-deny", cmd_verify_deny, "check a deny proof"),
    ]:
        p = add(name, func, help_)
        p.add_argument("--contested", required=True)
        p.add_argument("--proof", required=True)
        p.add_argument("--nonce", required=True, help="verifier nonce, hex")

    p = add("link", cmd_link, "test whether two signatures come from one member")
    p.add_argument("--sig-a", required=True)
    p.add_argument("--sig-b", required=True)

    p = add("eg-setup", cmd_eg_setup, "generate the commitment group and trace key")
    p.add_argument("--fixture", choices=["toy"])
    p.add_argument("--bits", type=int)

    p = add("eg-commit", cmd_eg_commit, "commit to a member tuple")
    p.add_argument("--cred", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--reveal-out", required=True)

    p = add("eg-trace", cmd_eg_trace, "decrypt a bundle and look up the member")
    p.add_argument("--bundle", required=True)

    p = add("eg-reveal-verify", cmd_eg_reveal_verify, "check a randomness reveal")
    p.add_argument("--bundle", required=True)
    p.add_argument("--reveal", required=True)
    p.add_argument("--tuple", required=True, metavar="X1,...,Xk")

    return parser


def run(argv, stdin: bytes = b"", env=None) -> tuple[int, bytes, bytes]:
    """Execute one invocation; returns ``(status, stdout, stderr)``."""
    env = os.environ if env is None else env
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:
            status = exc.code if isinstance(exc.code, int) else EXIT_USAGE
            return status, out.getvalue().encode(), err.getvalue().encode()
        s = Session(args, stdin, env, out)
        try:
            status = args.func(s)
        except Rejected as exc:
            s.say("REJECT", str(exc))
            status = EXIT_REJECT
        except (UsageError, ValueError, GsError) as exc:
            status = EXIT_IO if isinstance(exc, FormatError) else EXIT_USAGE
            print(f"error: {exc}", file=err)
        except OSError as exc:
            print(f"error: {exc}", file=err)
            status = EXIT_IO
    return status, out.getvalue().encode(), err.getvalue().encode()


def main(argv=None) -> int:
    stdin = b""
    argv = sys.argv[1:] if argv is None else argv
    if "-" in argv and not sys.stdin.isatty():
        stdin = sys.stdin.buffer.read()
    status, out, err = run(argv, stdin)
    sys.stdout.buffer.write(out)
    sys.stderr.buffer.write(err)
    return status


if __name__ == "__main__":
    sys.exit(main())

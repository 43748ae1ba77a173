"""The amalgamated product layer.

A context validates a presentation of G = A *_C B over free factors and
precomputes the transfer tables and normalizer data for C on both sides.  On
top of it live syllable decomposition, reduced and normal forms, cyclically
reduced forms, the principal-system solver, the regular/singular classifier,
and the partial conjugacy-search decider.  Undecided is a first-class
outcome: the decider halts with a verdict only on inputs it can certify.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .cosetalg import CosetOfC, c_coset, cardinality, shift, transfer
from .stallings import GeneratingTuple, build, pullback
from .words import Alphabet, Word, free_conjugacy, identity, substitute


class InvalidPresentationError(ValueError):
    """The generator pairing does not extend to an isomorphism of C."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class Syllable:
    side: str  # "A" | "B"
    word: Word


@dataclass(frozen=True)
class NormalForm:
    """head * s1 * ... * sn with head in C and alternating coset representatives."""

    head_side: str
    head: Word
    syllables: tuple[Syllable, ...]

    @property
    def syllable_length(self) -> int:
        return len(self.syllables)

    def sides(self) -> tuple[str, ...]:
        return tuple(s.side for s in self.syllables)


@dataclass(frozen=True)
class ReducedForm:
    head_side: str
    head: Word
    syllables: tuple[Syllable, ...]

    @property
    def syllable_length(self) -> int:
        return len(self.syllables)


@dataclass(frozen=True)
class CyclicForm:
    """form plus a conjugator with original = conjugator * form * ~conjugator.

    certified is False only when the CMSP-free variant stopped at syllable
    length 1 without checking conjugacy into C.
    """

    form: NormalForm
    conjugator: Word  # over the union alphabet
    certified: bool = True

    @property
    def cyclic_length(self) -> int:
        return self.form.syllable_length


@dataclass(frozen=True)
class RepPolicy:
    """Coset-representative policy: canonical geodesics or the adversarial set."""

    kind: str = "canonical"  # "canonical" | "paper-ex1"
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("canonical", "paper-ex1"):
            raise ValueError(f"unknown policy {self.kind!r}")
        if self.kind == "paper-ex1" and self.p < 2:
            raise ValueError("adversarial policy needs p >= 2")

    @staticmethod
    def canonical() -> "RepPolicy":
        return RepPolicy()

    @staticmethod
    def paper_example_one(p: int) -> "RepPolicy":
        return RepPolicy("paper-ex1", p)


CANONICAL = RepPolicy()


@dataclass(frozen=True)
class RegularityReport:
    verdict: str  # "regular" | "singular"
    witness_kind: Optional[str] = None  # "bad-pair" | "normalizer" | "z-set"
    witness: tuple[tuple[str, str, Word], ...] = ()
    detail: str = ""

    @property
    def is_regular(self) -> bool:
        return self.verdict == "regular"


@dataclass(frozen=True)
class ConjugacyOutcome:
    tag: str  # "conjugate" | "not-conjugate" | "undecided"
    conjugator: Optional[Word] = None
    reason: str = ""


class AmalgamContext:
    """Validated presentation of G = A *_C B with precomputed transfer data.

    Immutable after construction apart from an internal memo cache; all
    queries are pure, so independent lookups may run concurrently.
    """

    def __init__(
        self,
        alphabet_a: Alphabet,
        alphabet_b: Alphabet,
        pairs: tuple[tuple[Word, Word], ...],
        graph_ca: GeneratingTuple,
        graph_cb: GeneratingTuple,
        phi_images: tuple[Word, ...],
        psi_images: tuple[Word, ...],
    ):
        self.alphabet_a = alphabet_a
        self.alphabet_b = alphabet_b
        self.union_alphabet = Alphabet(alphabet_a.names + alphabet_b.names)
        self.pairs = pairs
        self.graph_ca = graph_ca
        self.graph_cb = graph_cb
        self.phi_images = phi_images
        self.psi_images = psi_images
        self.transversal_a = graph_ca.double_transversal()
        self.transversal_b = graph_cb.double_transversal()
        self.z_graphs_a = {t: graph_ca.z_subgroup(t) for t in self.transversal_a[1:]}
        self.z_graphs_b = {t: graph_cb.z_subgroup(t) for t in self.transversal_b[1:]}
        self.malnormal_a = graph_ca.is_malnormal()
        self.malnormal_b = graph_cb.is_malnormal()
        self.cache: dict = {}

    # --- sides and alphabets -------------------------------------------------

    def factor_alphabet(self, side: str) -> Alphabet:
        return self.alphabet_a if side == "A" else self.alphabet_b

    def graph_c(self, side: str) -> GeneratingTuple:
        return self.graph_ca if side == "A" else self.graph_cb

    @staticmethod
    def other(side: str) -> str:
        return "B" if side == "A" else "A"

    def side_of_letter(self, union_letter: int) -> str:
        return "A" if abs(union_letter) <= len(self.alphabet_a) else "B"

    def to_union(self, side: str, w: Word) -> Word:
        off = 0 if side == "A" else len(self.alphabet_a)
        return Word._make(
            self.union_alphabet,
            tuple(lt + off if lt > 0 else lt - off for lt in w.letters),
        )

    def _factor_word(self, side: str, union_letters: Sequence[int]) -> Word:
        off = 0 if side == "A" else len(self.alphabet_a)
        return Word._make(
            self.factor_alphabet(side),
            tuple(lt - off if lt > 0 else lt + off for lt in union_letters),
        )

    # --- transfer through the amalgamation ----------------------------------

    def transfer_word(self, side: str, w: Word) -> Word:
        """phi (A to B) or psi (B to A) of a C-element, via the C-basis table."""
        key = ("xfer", side, w.letters)
        hit = self.cache.get(key)
        if hit is None:
            graph = self.graph_c(side)
            images = self.phi_images if side == "A" else self.psi_images
            expr = graph.express_in_basis(w)
            hit = substitute(expr, images, self.factor_alphabet(self.other(side)))
            self.cache[key] = hit
        return hit

    def in_c(self, side: str, w: Word) -> bool:
        return self.graph_c(side).contains(w)


def build_context(
    alphabet_a: Alphabet | Iterable[str],
    alphabet_b: Alphabet | Iterable[str],
    pairs: Sequence[tuple[Word, Word]],
) -> AmalgamContext:
    """Validate a pairing u_i <-> v_i and assemble the context.

    The map defined on a free basis of each side is checked to send every u_i
    to v_i and back; passing certifies that the pairing extends to mutually
    inverse isomorphisms between the two copies of C.
    """
    if not isinstance(alphabet_a, Alphabet):
        alphabet_a = Alphabet(tuple(alphabet_a))
    if not isinstance(alphabet_b, Alphabet):
        alphabet_b = Alphabet(tuple(alphabet_b))
    overlap = set(alphabet_a.names) & set(alphabet_b.names)
    if overlap:
        raise InvalidPresentationError(
            f"factor alphabets share generator names {sorted(overlap)}"
        )
    pairs = tuple(pairs)
    if not pairs:
        raise InvalidPresentationError("at least one amalgamation pair is required")
    for i, (u, v) in enumerate(pairs, 1):
        if u.alphabet != alphabet_a or v.alphabet != alphabet_b:
            raise InvalidPresentationError(
                f"pair {i} is not over the declared alphabets", index=i
            )
        if not u or not v:
            raise InvalidPresentationError(f"pair {i} has a trivial side", index=i)
    graph_ca = build([u for u, _ in pairs], alphabet_a)
    graph_cb = build([v for _, v in pairs], alphabet_b)
    u_words = [u for u, _ in pairs]
    v_words = [v for _, v in pairs]
    phi_images = tuple(
        substitute(graph_ca.express_in_generators(b), v_words, alphabet_b)
        for b in graph_ca.basis()
    )
    psi_images = tuple(
        substitute(graph_cb.express_in_generators(b), u_words, alphabet_a)
        for b in graph_cb.basis()
    )
    for i, (u, v) in enumerate(pairs, 1):
        img = substitute(graph_ca.express_in_basis(u), phi_images, alphabet_b)
        if img != v:
            raise InvalidPresentationError(
                f"pair {i}: the pairing is not an isomorphism of C"
                f" (u_{i} maps to {img!r}, expected {v!r})",
                index=i,
            )
    for i, (u, v) in enumerate(pairs, 1):
        img = substitute(graph_cb.express_in_basis(v), psi_images, alphabet_a)
        if img != u:
            raise InvalidPresentationError(
                f"pair {i}: the reverse pairing is not an isomorphism of C"
                f" (v_{i} maps to {img!r}, expected {u!r})",
                index=i,
            )
    return AmalgamContext(
        alphabet_a, alphabet_b, pairs, graph_ca, graph_cb, phi_images, psi_images
    )


# --- syllables and reduced forms ---------------------------------------------


def syllable_decompose(ctx: AmalgamContext, raw: Word) -> list[Syllable]:
    """Maximal alternating factor blocks of a word over the union alphabet."""
    if raw.alphabet != ctx.union_alphabet:
        raise ValueError("word is not over the union alphabet")
    out: list[Syllable] = []
    block: list[int] = []
    side = ""
    for lt in raw.letters:
        s = ctx.side_of_letter(lt)
        if s != side and block:
            out.append(Syllable(side, ctx._factor_word(side, block)))
            block = []
        side = s
        block.append(lt)
    if block:
        out.append(Syllable(side, ctx._factor_word(side, block)))
    return out


def _transfer_by_generators(ctx: AmalgamContext, side: str, w: Word) -> Word:
    """Transfer a C-element by rewriting it over the given generators."""
    graph = ctx.graph_c(side)
    images = [v for _, v in ctx.pairs] if side == "A" else [u for u, _ in ctx.pairs]
    expr = graph.express_in_generators(w)
    return substitute(expr, images, ctx.factor_alphabet(ctx.other(side)))


def _squash(sylls: list[Syllable]) -> list[Syllable]:
    out: list[Syllable] = []
    for s in sylls:
        if not s.word:
            continue
        if out and out[-1].side == s.side:
            w = out.pop().word * s.word
            if w:
                out.append(Syllable(s.side, w))
        else:
            out.append(s)
    return out


def reduced_form(ctx: AmalgamContext, syllables: Sequence[Syllable]) -> ReducedForm:
    """Eliminate C-syllables by transferring them into their neighbours."""
    sylls = _squash(list(syllables))
    while True:
        idx = next(
            (i for i, s in enumerate(sylls) if ctx.in_c(s.side, s.word)), None
        )
        if idx is None:
            break
        s = sylls[idx]
        if len(sylls) == 1:
            head = s.word if s.side == "A" else ctx.transfer_word("B", s.word)
            return ReducedForm("A", head, ())
        moved = _transfer_by_generators(ctx, s.side, s.word)
        repl = [Syllable(ctx.other(s.side), moved)] if moved else []
        sylls = _squash(sylls[:idx] + repl + sylls[idx + 1 :])
    head_side = sylls[0].side if sylls else "A"
    return ReducedForm(head_side, identity(ctx.factor_alphabet(head_side)), tuple(sylls))


# --- representative policies and normal forms ---------------------------------


def _is_example_one_fixture(ctx: AmalgamContext, p: int) -> bool:
    if len(ctx.alphabet_a) != 3 or len(ctx.alphabet_b) != 3 or len(ctx.pairs) != 2:
        return False
    (u1, v1), (u2, v2) = ctx.pairs
    return (
        u1.letters == (1,) * p
        and v1.letters == (1,)
        and u2.letters == (2,)
        and v2.letters == (2,) * p
    )


def _check_policy(ctx: AmalgamContext, policy: RepPolicy) -> None:
    if policy.kind == "paper-ex1" and not _is_example_one_fixture(ctx, policy.p):
        raise ValueError(
            "the adversarial policy is only defined for the worst-case fixture"
        )


def _adversarial_rep(side: str, rep: Word, p: int) -> Optional[Word]:
    # A side: canonical rep d a^(pm) gets representative b^(-pm) d a^(pm);
    # B side: canonical rep z y^(pm) gets representative x^(-pm) z y^(pm).
    ls = rep.letters
    if len(ls) < 2 or ls[0] != 3:
        return None
    tail = ls[1:]
    run = 1 if side == "A" else 2
    if any(abs(lt) != run for lt in tail):
        return None
    sign = 1 if tail[0] > 0 else -1
    if any((lt > 0) != (sign > 0) for lt in tail):
        return None
    j = sign * len(tail)
    if j % p != 0:
        return None
    swap = 2 if side == "A" else 1
    return Word(rep.alphabet, (-sign * swap,) * abs(j) + (3,) + tail)


def _rep(
    ctx: AmalgamContext, side: str, w: Word, policy: RepPolicy
) -> tuple[Word, Word]:
    rep, head = ctx.graph_c(side).coset_rep(w)
    if policy.kind == "paper-ex1" and rep:
        rep2 = _adversarial_rep(side, rep, policy.p)
        if rep2 is not None:
            return rep2, w * ~rep2
    return rep, head


def normal_form(
    ctx: AmalgamContext,
    raw: Word,
    policy: RepPolicy = CANONICAL,
    trace: Optional[list[int]] = None,
) -> NormalForm:
    """Right-to-left sweep into the unique normal form for the active policy.

    The carry (the C-element extracted from the current tail) is transferred
    across the amalgamation each time it moves past a syllable; `trace`, when
    given, records its length after every step.
    """
    _check_policy(ctx, policy)
    sylls = syllable_decompose(ctx, raw)
    done: list[Syllable] = []
    carry_side = "A"
    carry = identity(ctx.alphabet_a)
    for s in reversed(sylls):
        if carry:
            moved = (
                carry if carry_side == s.side else ctx.transfer_word(carry_side, carry)
            )
            w = s.word * moved
        else:
            w = s.word
        rep, head = _rep(ctx, s.side, w, policy)
        if rep:
            if done and done[0].side == s.side:
                merged = rep * done.pop(0).word
                rep2, head2 = _rep(ctx, s.side, merged, policy)
                head = head * head2
                if rep2:
                    done.insert(0, Syllable(s.side, rep2))
            else:
                done.insert(0, Syllable(s.side, rep))
        carry_side, carry = s.side, head
        if trace is not None:
            trace.append(len(carry))
    target = done[0].side if done else "A"
    if carry_side != target:
        carry = (
            ctx.transfer_word(carry_side, carry)
            if carry
            else identity(ctx.factor_alphabet(target))
        )
    assert ctx.in_c(target, carry), "normal-form head escaped C"
    return NormalForm(target, carry, tuple(done))


def form_to_word(ctx: AmalgamContext, nf: NormalForm | ReducedForm) -> Word:
    """The normal form as a plain word over the union alphabet."""
    w = ctx.to_union(nf.head_side, nf.head)
    for s in nf.syllables:
        w = w * ctx.to_union(s.side, s.word)
    return w


# --- cyclically reduced forms --------------------------------------------------


def cyclic_form(
    ctx: AmalgamContext,
    raw: Word,
    policy: RepPolicy = CANONICAL,
    allow_cmsp: bool = True,
) -> CyclicForm:
    """Cyclically reduced conjugate with accumulated conjugator.

    With allow_cmsp the syllable-length-1 case is settled by conjugacy into C
    on the factor; without it the sweep stops there and the result is only
    guaranteed cyclically reduced when its length exceeds 1.
    """
    nf = normal_form(ctx, raw, policy)
    conj = identity(ctx.union_alphabet)
    head_side, head, sylls = nf.head_side, nf.head, list(nf.syllables)
    certified = True
    while True:
        if sylls and head_side != sylls[0].side:
            head = (
                ctx.transfer_word(head_side, head)
                if head
                else identity(ctx.factor_alphabet(sylls[0].side))
            )
            head_side = sylls[0].side
        k = len(sylls)
        if k == 0:
            break
        if k == 1:
            if not allow_cmsp:
                certified = False
                break
            side = sylls[0].side
            w_full = head * sylls[0].word
            hit = ctx.graph_c(side).conjugacy_into(w_full)
            if hit is None:
                break
            target, z = hit
            conj = conj * ~ctx.to_union(side, z)
            head_side, head, sylls = side, target, []
            break
        first, last = sylls[0], sylls[-1]
        if first.side != last.side:
            break
        side = first.side
        w = last.word * head * first.word
        conj = conj * ~ctx.to_union(side, last.word)
        rep, head2 = _rep(ctx, side, w, policy)
        head_side, head = side, head2
        sylls = ([Syllable(side, rep)] if rep else []) + sylls[1:-1]
    if not sylls and head_side != "A":
        head = ctx.transfer_word(head_side, head) if head else identity(ctx.alphabet_a)
        head_side = "A"
    form = NormalForm(head_side, head, tuple(sylls))
    result = CyclicForm(form, conj, certified)
    check = normal_form(ctx, conj * form_to_word(ctx, form) * ~conj, policy)
    assert check == nf, "cyclic reduction lost the conjugacy class"
    return result


def _cyclic_perms(
    ctx: AmalgamContext, form: NormalForm, policy: RepPolicy
) -> list[tuple[Word, NormalForm]]:
    """All cyclic permutations pi_j of a cyclically reduced normal form.

    Each entry is (w_j, pi_j) with form = w_j * pi_j * ~w_j, where w_j is the
    head followed by the first j syllables.
    """
    k = form.syllable_length
    out = []
    head_u = ctx.to_union(form.head_side, form.head)
    for j in range(k):
        prefix = head_u
        for s in form.syllables[:j]:
            prefix = prefix * ctx.to_union(s.side, s.word)
        word = identity(ctx.union_alphabet)
        for s in form.syllables[j:]:
            word = word * ctx.to_union(s.side, s.word)
        word = word * head_u
        for s in form.syllables[:j]:
            word = word * ctx.to_union(s.side, s.word)
        pi = normal_form(ctx, word, policy)
        assert pi.syllable_length == k
        out.append((prefix, pi))
    return out


# --- principal systems ----------------------------------------------------------


def _syll_key(nf: NormalForm) -> tuple:
    return tuple((s.side, s.word.letters) for s in nf.syllables)


def principal_system_solve(
    ctx: AmalgamContext, g: NormalForm, h: NormalForm
) -> Optional[CosetOfC]:
    """E_{g,h}: the coset of first components of solutions of the principal system.

    Runs the D-recursion D_i = p_{k-i+1} D_{i-1} p'_{k-i+1}^-1 meet C from
    D_0 = C, transferring sides as the conjugators alternate, then pulls the
    final coset back through the chain.  None means the system has no
    solution in C.
    """
    k = g.syllable_length
    if k != h.syllable_length or k < 1:
        raise ValueError("principal systems need equal syllable lengths >= 1")
    if g.sides() != h.sides():
        return None
    key = ("ps", _syll_key(g), _syll_key(h))
    if key in ctx.cache:
        return ctx.cache[key]
    ps = list(zip(g.syllables, h.syllables))
    d = c_coset(ctx, ps[-1][0].side)
    for i in range(1, k + 1):
        p, p2 = ps[k - i]
        if d.side != p.side:
            d = transfer(ctx, d)
        d = shift(ctx, d, p.word, ~p2.word)
        if d is None:
            ctx.cache[key] = None
            return None
    e = d
    for p, p2 in ps:
        if e.side != p.side:
            e = transfer(ctx, e)
        e = shift(ctx, e, ~p.word, p2.word)
        assert e is not None, "back-substitution left C"
    ctx.cache[key] = e
    return e


def _propagate_solution(
    ctx: AmalgamContext, g: NormalForm, h: NormalForm, c: Word, side: str
) -> Word:
    """Push the first component c through the chain; returns c_k on side of p_1."""
    ps = list(zip(g.syllables, h.syllables))
    cur, cur_side = c, side
    for p, p2 in reversed(ps):
        if cur_side != p.side:
            cur = ctx.transfer_word(cur_side, cur)
            cur_side = p.side
        cur = p.word * cur * ~p2.word
        assert ctx.in_c(cur_side, cur), "principal solution left C"
    return cur


# --- regularity -------------------------------------------------------------------


def classify(
    ctx: AmalgamContext, raw: Word, policy: RepPolicy = CANONICAL
) -> RegularityReport:
    """Regular/singular verdict with a witness for the singular cases."""
    return _classify_nf(ctx, normal_form(ctx, raw, policy))


def _classify_nf(ctx: AmalgamContext, nf: NormalForm) -> RegularityReport:
    k = nf.syllable_length
    if k >= 2:
        key = ("classify2", _syll_key(nf))
        hit = ctx.cache.get(key)
        if hit is not None:
            return hit
        e = principal_system_solve(ctx, nf, nf)
        assert e is not None and e.contains(identity(e.rep.alphabet))
        if cardinality(e).is_infinite:
            wit = e.subgroup.basis()[0]
            report = RegularityReport(
                "singular",
                "bad-pair",
                (("solution", e.side, wit),),
                "the principal system of the element against itself has a"
                " nontrivial solution",
            )
        else:
            report = RegularityReport("regular")
        ctx.cache[key] = report
        return report
    if k == 1:
        side = nf.syllables[0].side
        w = nf.head * nf.syllables[0].word
        key = ("classify1", side, w.letters)
        hit = ctx.cache.get(key)
        if hit is not None:
            return hit
        graph = ctx.graph_c(side)
        meet = pullback(graph.conjugate(w), graph)
        if meet.graph.is_trivial():
            report = RegularityReport("regular")
        else:
            report = RegularityReport(
                "singular",
                "normalizer",
                (("intersection", side, meet.basis()[0]),),
                "the element lies in the generalized normalizer of C",
            )
        ctx.cache[key] = report
        return report
    key = ("classify0", nf.head.letters)
    hit = ctx.cache.get(key)
    if hit is not None:
        return hit
    report = None
    for side, w in (("A", nf.head), ("B", ctx.transfer_word("A", nf.head))):
        found = ctx.graph_c(side).z_set_witness(w)
        if found is not None:
            t, target, conj = found
            report = RegularityReport(
                "singular",
                "z-set",
                (
                    ("transversal", side, t),
                    ("target", side, target),
                    ("conjugator", side, conj),
                ),
                "a non-C element conjugates the representative back into C",
            )
            break
    if report is None:
        report = RegularityReport("regular")
    ctx.cache[key] = report
    return report


def cr_membership(
    ctx: AmalgamContext, raw: Word, policy: RepPolicy = CANONICAL
) -> tuple[str, Optional[CyclicForm]]:
    """Class of the element among CR>1 / CR0 / CR1 / not cyclically regular.

    For cyclic length above 1 every cyclic permutation is classified and the
    first regular one is returned together with its accumulated conjugator.
    """
    cf = cyclic_form(ctx, raw, policy)
    k = cf.cyclic_length
    if k == 1:
        return "cr1", cf
    if k == 0:
        if _classify_nf(ctx, cf.form).is_regular:
            return "cr0", cf
        return "not-cr", None
    for prefix, pi in _cyclic_perms(ctx, cf.form, policy):
        if _classify_nf(ctx, pi).is_regular:
            return "cr>1", CyclicForm(pi, cf.conjugator * prefix, cf.certified)
    return "not-cr", None


# --- conjugacy search ---------------------------------------------------------------


def _assemble_and_verify(
    ctx: AmalgamContext, u: Word, v: Word, z: Word, policy: RepPolicy
) -> Word:
    assert normal_form(ctx, ~z * u * z, policy) == normal_form(ctx, v, policy), (
        "conjugator failed verification"
    )
    return z


def _solve_with_regular(
    ctx: AmalgamContext,
    u: Word,
    v: Word,
    cf_u: CyclicForm,
    cf_v: CyclicForm,
    policy: RepPolicy,
) -> Optional[ConjugacyOutcome]:
    """Decide conjugacy when some cyclic permutation of u's form is regular.

    Returns None when no permutation of u's form is regular; otherwise a
    definite outcome.  A regular permutation admits at most one principal
    solution, which must also satisfy the closing constraint c_g c_k = c c_g'.
    """
    reg = next(
        (
            (prefix, pi)
            for prefix, pi in _cyclic_perms(ctx, cf_u.form, policy)
            if _classify_nf(ctx, pi).is_regular
        ),
        None,
    )
    if reg is None:
        return None
    u_prefix, g_star = reg
    sides = g_star.sides()
    for w_j, pi_j in _cyclic_perms(ctx, cf_v.form, policy):
        if pi_j.sides() != sides:
            continue
        e = principal_system_solve(ctx, g_star, pi_j)
        if e is None:
            continue
        card = cardinality(e)
        assert not card.is_infinite, "regular element with non-unique solution"
        c = card.element
        c_k = _propagate_solution(ctx, g_star, pi_j, c, e.side)
        side1 = g_star.syllables[0].side
        c_on_1 = c if e.side == side1 else ctx.transfer_word(e.side, c)
        if g_star.head * c_k != c_on_1 * pi_j.head:
            continue
        c_union = ctx.to_union(e.side, c)
        z = cf_u.conjugator * u_prefix * c_union * ~w_j * ~cf_v.conjugator
        return ConjugacyOutcome(
            "conjugate", _assemble_and_verify(ctx, u, v, z, policy)
        )
    return ConjugacyOutcome(
        "not-conjugate",
        None,
        "a regular cyclic permutation admits no conjugating C-element",
    )


def conjugacy_search(
    ctx: AmalgamContext, u: Word, v: Word, policy: RepPolicy = CANONICAL
) -> ConjugacyOutcome:
    """Partial conjugacy decider; every Conjugate outcome carries a verified z.

    Halts with a definite answer whenever one side has a regular cyclically
    reduced permutation, on all cyclic length 0 pairs with a regular
    representative or a malnormal factor, and on all cyclic length 1 pairs.
    """
    cf_u = cyclic_form(ctx, u, policy)
    cf_v = cyclic_form(ctx, v, policy)
    k = cf_u.cyclic_length
    if k != cf_v.cyclic_length:
        return ConjugacyOutcome("not-conjugate", None, "cyclic lengths differ")
    if k == 1:
        su, sv = cf_u.form.syllables[0], cf_v.form.syllables[0]
        if su.side != sv.side:
            return ConjugacyOutcome(
                "not-conjugate", None, "cyclically reduced forms lie in different factors"
            )
        wu = cf_u.form.head * su.word
        wv = cf_v.form.head * sv.word
        z_f = free_conjugacy(wu, wv)
        if z_f is None:
            return ConjugacyOutcome(
                "not-conjugate", None, "not conjugate inside the common factor"
            )
        z = cf_u.conjugator * ctx.to_union(su.side, z_f) * ~cf_v.conjugator
        return ConjugacyOutcome("conjugate", _assemble_and_verify(ctx, u, v, z, policy))
    if k >= 2:
        out = _solve_with_regular(ctx, u, v, cf_u, cf_v, policy)
        if out is not None:
            return out
        out = _solve_with_regular(ctx, v, u, cf_v, cf_u, policy)
        if out is not None:
            if out.tag == "conjugate":
                z = ~out.conjugator
                return ConjugacyOutcome(
                    "conjugate", _assemble_and_verify(ctx, u, v, z, policy)
                )
            return out
        return ConjugacyOutcome(
            "undecided", None, "every cyclic permutation of both forms is singular"
        )
    # cyclic length 0: both conjugate into C
    hu, hv = cf_u.form.head, cf_v.form.head
    reg_u = _classify_nf(ctx, cf_u.form).is_regular
    reg_v = _classify_nf(ctx, cf_v.form).is_regular
    if reg_u or reg_v:
        bu = ctx.graph_ca.express_in_basis(hu)
        bv = ctx.graph_ca.express_in_basis(hv)
        z_b = free_conjugacy(bu, bv)
        if z_b is None:
            return ConjugacyOutcome(
                "not-conjugate", None, "not conjugate within the amalgamated subgroup"
            )
        z_c = substitute(z_b, ctx.graph_ca.basis(), ctx.alphabet_a)
        z = cf_u.conjugator * ctx.to_union("A", z_c) * ~cf_v.conjugator
        return ConjugacyOutcome("conjugate", _assemble_and_verify(ctx, u, v, z, policy))
    for malnormal, side in ((ctx.malnormal_a, "B"), (ctx.malnormal_b, "A")):
        if not malnormal:
            continue
        w1 = hu if side == "A" else ctx.transfer_word("A", hu)
        w2 = hv if side == "A" else ctx.transfer_word("A", hv)
        z_f = free_conjugacy(w1, w2)
        if z_f is None:
            return ConjugacyOutcome(
                "not-conjugate",
                None,
                f"chains collapse into factor {side}, where the forms are not conjugate",
            )
        z = cf_u.conjugator * ctx.to_union(side, z_f) * ~cf_v.conjugator
        return ConjugacyOutcome("conjugate", _assemble_and_verify(ctx, u, v, z, policy))
    return ConjugacyOutcome(
        "undecided",
        None,
        "both representatives are singular and C is malnormal in neither factor",
    )


def _reduced_words(alphabet: Alphabet, max_len: int):
    """All freely reduced words of length <= max_len, by length then letters."""
    n = len(alphabet)
    order = [lt for i in range(1, n + 1) for lt in (i, -i)]
    frontier: list[tuple[int, ...]] = [()]
    yield Word(alphabet, ())
    for _ in range(max_len):
        nxt = []
        for ls in frontier:
            for lt in order:
                if ls and ls[-1] == -lt:
                    continue
                ext = ls + (lt,)
                nxt.append(ext)
                yield Word(alphabet, ext)
        frontier = nxt


def brute_conjugacy_oracle(
    ctx: AmalgamContext, u: Word, v: Word, bound: int
) -> Optional[Word]:
    """Search all conjugators z with |z| <= bound; sound but incomplete.

    Meets in the middle: z = z1 z2 works iff ~z1 u z1 equals z2 v ~z2, so both
    halves only need length ceil(bound/2).
    """
    half_r = bound // 2
    half_l = bound - half_r
    right: dict[NormalForm, Word] = {}
    for z2 in _reduced_words(ctx.union_alphabet, half_r):
        key = normal_form(ctx, z2 * v * ~z2)
        right.setdefault(key, z2)
    for z1 in _reduced_words(ctx.union_alphabet, half_l):
        key = normal_form(ctx, ~z1 * u * z1)
        z2 = right.get(key)
        if z2 is not None:
            z = z1 * z2
            assert normal_form(ctx, ~z * u * z) == normal_form(ctx, v)
            return z
    return None

"""Trial schedules, participant runs and scoring for the six simulations.

Designs are read from an INI file (``data/designs.ini`` by default). Four
design kinds exist:

``yu_smith``
    n words and n referents per trial, each pair trained a fixed number of
    times, followed by a four-alternative test per word.
``yurovsky``
    four-word trials mixing single words (one referent), double words (two
    referents) and noise words (none), built from letter templates such as
    ``SSDN``. ``variant`` says how a double word meets its referents: ``both``
    in the same trial, ``one`` per trial in random order, or ``ordered`` with
    the early referent taking every co-occurrence before the late one.
``trueswell``
    one word with several referents per trial, the learner choosing a
    referent on every trial, for a fixed number of cycles.
``context``
    two word lists sharing one ambiguous word, trained in alternating cycles,
    then tested after a context-inducing run of trials from each list.
"""

from __future__ import annotations

import configparser
from collections import Counter
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .params import ModelConfig
from .pipeline import ModelState, Representations, Stimulus

KINDS = ("yu_smith", "yurovsky", "trueswell", "context")
VARIANTS = ("both", "one", "ordered")
OUTCOMES = ("Single", "Double", "Either", "Miss")


class DesignError(ValueError):
    pass


class ScheduleError(RuntimeError):
    """No schedule satisfies the design's constraints."""


def _words(text: str) -> tuple[str, ...]:
    return tuple(text.split())


def _templates(text: str) -> tuple[tuple[int, str], ...]:
    out = []
    for tok in text.split():
        count, _, letters = tok.partition("*")
        if not letters:
            count, letters = "1", count
        if not count.isdigit() or set(letters) - set("SDN"):
            raise DesignError(f"bad trial template {tok!r}")
        out.append((int(count), letters))
    return tuple(out)


def _conditions(text: str) -> tuple[tuple[tuple[int, str], ...], ...]:
    out = []
    for tok in text.split():
        parts = []
        for piece in tok.split("+"):
            n, lst = piece[:-1], piece[-1:]
            if not n.isdigit() or lst not in ("a", "b"):
                raise DesignError(f"bad test condition {tok!r}")
            parts.append((int(n), lst))
        out.append(tuple(parts))
    return tuple(out)


def condition_label(cond) -> str:
    return "+".join(f"{n}{lst}" for n, lst in cond)


def condition_group(cond) -> str:
    """``3a+3b`` and ``3b+3a`` both belong to group ``3+3``."""
    return "+".join(str(n) for n, _ in cond)


@dataclass(frozen=True)
class ExperimentDesign:
    id: str
    kind: str
    participants: int
    occurrences: int = 6
    # yu_smith and trueswell
    words: tuple[str, ...] = ()
    trial_size: int = 0
    foils: int = 3
    # yurovsky
    variant: str = ""
    single: tuple[str, ...] = ()
    double: tuple[str, ...] = ()
    second: tuple[str, ...] = ()
    noise: tuple[str, ...] = ()
    templates: tuple[tuple[int, str], ...] = ()
    # trueswell and context
    cycles: int = 0
    alternatives: int = 0
    # context
    list_a: tuple[str, ...] = ()
    list_b: tuple[str, ...] = ()
    ambiguous: str = ""
    referent_a: str = ""
    referent_b: str = ""
    repeats: int = 0
    induction_alternatives: int = 0
    conditions: tuple[tuple[tuple[int, str], ...], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DesignError(f"{self.id}: unknown kind {self.kind!r}")
        if self.participants < 1 or self.occurrences < 1:
            raise DesignError(f"{self.id}: participants and occurrences must be positive")
        check = getattr(self, f"_check_{self.kind}")
        check()

    def _check_yu_smith(self):
        n = len(self.words)
        if len(set(self.words)) != n or not 1 <= self.trial_size <= n:
            raise DesignError(f"{self.id}: bad word list or trial size")
        if (n * self.occurrences) % self.trial_size:
            raise DesignError(f"{self.id}: {n}x{self.occurrences} pairs do not fill "
                              f"{self.trial_size}-pair trials")
        if self.foils >= n:
            raise DesignError(f"{self.id}: more foils than other referents")

    def _check_yurovsky(self):
        if self.variant not in VARIANTS:
            raise DesignError(f"{self.id}: unknown variant {self.variant!r}")
        if len(self.second) != len(self.double):
            raise DesignError(f"{self.id}: every double word needs a second referent")
        names = self.single + self.double + self.second + self.noise
        if len(set(names)) != len(names):
            raise DesignError(f"{self.id}: word lists overlap")
        per_double = self.occurrences * (1 if self.variant == "both" else 2)
        need = {"S": len(self.single) * self.occurrences,
                "D": len(self.double) * per_double,
                "N": len(self.noise) * self.occurrences}
        have = Counter()
        for count, letters in self.templates:
            for ch in letters:
                have[ch] += count
        for ch, n in need.items():
            if have[ch] != n:
                raise DesignError(f"{self.id}: templates hold {have[ch]} '{ch}' slots, "
                                  f"design needs {n}")
        per_d = 2 if self.variant == "both" else 1
        sizes = {t.count("S") + per_d * t.count("D") for _, t in self.templates}
        if len(sizes) != 1:
            raise DesignError(f"{self.id}: trials would show different numbers of referents")

    def _check_trueswell(self):
        if len(set(self.words)) != len(self.words) or self.cycles < 2:
            raise DesignError(f"{self.id}: need distinct words and at least two cycles")
        if not 2 <= self.alternatives <= len(self.words):
            raise DesignError(f"{self.id}: alternatives must lie in [2, {len(self.words)}]")

    def _check_context(self):
        if self.ambiguous not in self.list_a or self.ambiguous not in self.list_b:
            raise DesignError(f"{self.id}: the ambiguous word must be in both lists")
        if set(self.list_a) & set(self.list_b) != {self.ambiguous}:
            raise DesignError(f"{self.id}: lists may share only the ambiguous word")
        if not self.referent_a or self.referent_a == self.referent_b:
            raise DesignError(f"{self.id}: the ambiguous word needs two distinct referents")
        if self.cycles < 1 or self.repeats < 1:
            raise DesignError(f"{self.id}: cycles and repeats must be positive")
        if not 2 <= self.alternatives <= len(self.list_a):
            raise DesignError(f"{self.id}: alternatives exceed list length")
        for cond in self.conditions:
            for n, lst in cond:
                if n > len(self.list_words(lst)) - 1:
                    raise DesignError(f"{self.id}: condition {condition_label(cond)} needs "
                                      f"more induction words than the list has")

    # -- lookups ----------------------------------------------------------
    def list_words(self, tag: str) -> tuple[str, ...]:
        return self.list_a if tag == "a" else self.list_b

    def referent_of(self, word: str, tag: str | None = None) -> str:
        if self.kind == "context" and word == self.ambiguous:
            if tag not in ("a", "b"):
                raise DesignError("the ambiguous word's referent depends on the list")
            return self.referent_a if tag == "a" else self.referent_b
        return word

    def second_of(self, word: str) -> str:
        return self.second[self.double.index(word)]

    @property
    def all_words(self) -> tuple[str, ...]:
        if self.kind == "yurovsky":
            return self.single + self.double + self.noise
        if self.kind == "context":
            return tuple(dict.fromkeys(self.list_a + self.list_b))
        return self.words

    @property
    def all_referents(self) -> tuple[str, ...]:
        if self.kind == "yurovsky":
            return self.single + self.double + self.second
        if self.kind == "context":
            a = tuple(self.referent_of(w, "a") for w in self.list_a)
            b = tuple(self.referent_of(w, "b") for w in self.list_b)
            return a + b
        return self.words


def _design_from_section(name: str, sec: configparser.SectionProxy) -> ExperimentDesign:
    known = {f for f in ExperimentDesign.__dataclass_fields__ if f != "id"}
    kw = {}
    for key in sec:
        if key not in known and key in sec.parser.defaults():
            continue
        if key not in known:
            raise DesignError(f"[{name}] unknown key {key!r}")
        raw = sec[key]
        if key in ("participants", "occurrences", "trial_size", "foils", "cycles",
                   "alternatives", "repeats", "induction_alternatives"):
            kw[key] = int(raw)
        elif key == "templates":
            kw[key] = _templates(raw)
        elif key == "conditions":
            kw[key] = _conditions(raw)
        elif key in ("kind", "variant", "ambiguous", "referent_a", "referent_b"):
            kw[key] = raw.strip()
        else:
            kw[key] = _words(raw)
    if "kind" not in kw or "participants" not in kw:
        raise DesignError(f"[{name}] needs kind and participants")
    return ExperimentDesign(id=name, **kw)


def parse_designs(text: str) -> dict[str, ExperimentDesign]:
    parser = configparser.ConfigParser(interpolation=configparser.ExtendedInterpolation(),
                                       inline_comment_prefixes=(";",))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise DesignError(str(exc)) from None
    return {name: _design_from_section(name, parser[name]) for name in parser.sections()}


def load_designs(path: str | Path | None = None) -> dict[str, ExperimentDesign]:
    if path is None:
        text = resources.files("cswl").joinpath("data/designs.ini").read_text()
    else:
        text = Path(path).read_text()
    return parse_designs(text)


def get_design(design_id: str, path: str | Path | None = None) -> ExperimentDesign:
    designs = load_designs(path)
    if design_id not in designs:
        raise DesignError(f"unknown experiment {design_id!r}; known: {', '.join(designs)}")
    return designs[design_id]


# -- schedules -------------------------------------------------------------

@dataclass(frozen=True)
class TestItem:
    word: str
    candidates: tuple[str, ...]
    correct: frozenset[str]
    kind: str = "single"
    early: str | None = None
    late: str | None = None
    condition: str | None = None
    induction: tuple[Stimulus, ...] = ()


@dataclass
class TrialSchedule:
    design_id: str
    trials: list[Stimulus]
    tests: list[TestItem] = field(default_factory=list)
    targets: list[str | None] = field(default_factory=list)
    cycles: list[int] = field(default_factory=list)
    lists: list[str] = field(default_factory=list)


def _pick(rng: np.random.Generator, items: list[str], k: int, weights=None) -> list[str]:
    if k == 0:
        return []
    if weights is None:
        idx = rng.choice(len(items), size=k, replace=False)
    else:
        w = np.asarray(weights, dtype=float)
        idx = rng.choice(len(items), size=k, replace=False, p=w / w.sum())
    return [items[i] for i in idx]


def _fill_once(rng, slots, items, count, cost=None, record=None):
    remaining = dict.fromkeys(items, count)
    left = sum(1 for s in slots if s)
    out: list[list[str]] = []
    for t, k in enumerate(slots):
        if k == 0:
            out.append([])
            continue
        forced = [it for it in items if remaining[it] == left]
        free = [it for it in items if remaining[it] > 0 and it not in forced]
        if len(forced) > k or len(free) < k - len(forced):
            return None
        w = [remaining[it] / (1.0 + (cost(it, t) if cost else 0.0)) for it in free]
        chosen = forced + _pick(rng, free, k - len(forced), w)
        for it in chosen:
            remaining[it] -= 1
            if record:
                record(it, t)
        out.append(chosen)
        left -= 1
    return out


def _fill(rng: np.random.Generator, slots: list[int], items, count: int,
          cost=None, record=None, reset=None, attempts: int = 200) -> list[list[str]]:
    """Place every item exactly ``count`` times into trials with ``slots[t]`` free places.

    Items are distinct within a trial. An item whose remaining count equals
    the number of trials still to fill is forced in; the rest are drawn in
    proportion to their remaining count, divided by ``1 + cost(item, t)`` when
    a cost is given. ``record`` sees each placement and ``reset`` runs before
    every attempt, so the cost may depend on earlier placements. Dead ends
    restart the draw.
    """
    items = list(items)
    if sum(slots) != count * len(items) or max(slots, default=0) > len(items):
        raise ScheduleError("slot counts cannot hold the requested occurrences")
    if count > sum(1 for s in slots if s):
        raise ScheduleError("an item must occur more often than there are trials")
    for _ in range(attempts):
        if reset:
            reset()
        out = _fill_once(rng, slots, items, count, cost, record)
        if out is not None:
            return out
    raise ScheduleError("could not satisfy the co-occurrence constraints")


def _shuffled(rng: np.random.Generator, seq) -> tuple:
    seq = list(seq)
    return tuple(seq[i] for i in rng.permutation(len(seq)))


def _test_items_rank(design: ExperimentDesign, rng, words, correct_of, pool, kind_of=None,
                     extra=None) -> list[TestItem]:
    items = []
    for w in words:
        correct = correct_of(w)
        others = [r for r in pool if r not in correct]
        foils = _pick(rng, others, 4 - len(correct))
        cands = _shuffled(rng, list(correct) + foils)
        kw = extra(w) if extra else {}
        items.append(TestItem(w, cands, frozenset(correct),
                              kind_of(w) if kind_of else "single", **kw))
    return items


def _gen_yu_smith(d: ExperimentDesign, rng) -> TrialSchedule:
    n_trials = len(d.words) * d.occurrences // d.trial_size
    filled = _fill(rng, [d.trial_size] * n_trials, d.words, d.occurrences)
    trials = [Stimulus(_shuffled(rng, ws), _shuffled(rng, [d.referent_of(w) for w in ws]))
              for ws in filled]
    words = _shuffled(rng, d.words)
    tests = []
    for w in words:
        target = d.referent_of(w)
        foils = _pick(rng, [r for r in d.all_referents if r != target], d.foils)
        tests.append(TestItem(w, _shuffled(rng, [target] + foils), frozenset([target])))
    return TrialSchedule(d.id, trials, tests)


def _gen_yurovsky(d: ExperimentDesign, rng) -> TrialSchedule:
    letters = [t for count, t in d.templates for _ in range(count)]
    letters = [letters[i] for i in rng.permutation(len(letters))]
    per_double = d.occurrences * (1 if d.variant == "both" else 2)
    singles = _fill(rng, [t.count("S") for t in letters], d.single, d.occurrences)
    doubles = _fill(rng, [t.count("D") for t in letters], d.double, per_double)

    # referents each double word shows in each trial
    shown: list[list[tuple[str, str]]] = [[] for _ in letters]
    if d.variant == "both":
        for t, ws in enumerate(doubles):
            shown[t] = [(w, r) for w in ws for r in (d.referent_of(w), d.second_of(w))]
    else:
        for w in d.double:
            occ = [t for t, ws in enumerate(doubles) if w in ws]
            first, second = d.referent_of(w), d.second_of(w)
            if d.variant == "ordered":
                early = first if rng.random() < 0.5 else second
                late = second if early == first else first
                assign = [early] * d.occurrences + [late] * d.occurrences
            else:
                assign = [first] * d.occurrences + [second] * d.occurrences
                assign = [assign[i] for i in rng.permutation(len(assign))]
            for t, r in zip(occ, assign):
                shown[t].append((w, r))

    referents_in = [[d.referent_of(w) for w in singles[t]] + [r for _, r in shown[t]]
                    for t in range(len(letters))]
    noise: list[list[str]] = [[] for _ in letters]
    if d.noise:
        cooc = Counter()

        def cost(item, t):
            return sum(cooc[(item, r)] for r in referents_in[t])

        def record(item, t):
            cooc.update((item, r) for r in referents_in[t])

        noise = _fill(rng, [t.count("N") for t in letters], d.noise, d.occurrences,
                      cost=cost, record=record, reset=cooc.clear)

    trials = []
    for t in range(len(letters)):
        words = singles[t] + doubles[t] + noise[t]
        trials.append(Stimulus(_shuffled(rng, words), _shuffled(rng, referents_in[t])))

    early_of = {}
    if d.variant == "ordered":
        for w in d.double:
            for t in range(len(letters)):
                hits = [r for ww, r in shown[t] if ww == w]
                if hits:
                    early_of[w] = hits[0]
                    break

    def correct_of(w):
        return (d.referent_of(w), d.second_of(w)) if w in d.double else (d.referent_of(w),)

    def extra(w):
        if w in early_of:
            e = early_of[w]
            return {"early": e, "late": d.second_of(w) if e == d.referent_of(w) else d.referent_of(w)}
        return {}

    tests = _test_items_rank(d, rng, _shuffled(rng, d.single + d.double), correct_of,
                             d.all_referents, lambda w: "double" if w in d.double else "single",
                             extra)
    return TrialSchedule(d.id, trials, tests)


def _gen_trueswell(d: ExperimentDesign, rng) -> TrialSchedule:
    order = _shuffled(rng, d.words)
    trials, targets, cycles = [], [], []
    for c in range(d.cycles):
        for w in order:
            target = d.referent_of(w)
            foils = _pick(rng, [r for r in d.all_referents if r != target], d.alternatives - 1)
            trials.append(Stimulus((w,), _shuffled(rng, [target] + foils)))
            targets.append(target)
            cycles.append(c)
    return TrialSchedule(d.id, trials, targets=targets, cycles=cycles)


def _list_trial(d: ExperimentDesign, rng, word: str, tag: str, size: int,
                exclude=()) -> Stimulus:
    target = d.referent_of(word, tag)
    pool = [d.referent_of(w, tag) for w in d.list_words(tag)]
    pool = [r for r in pool if r != target and r not in exclude]
    return Stimulus((word,), _shuffled(rng, [target] + _pick(rng, pool, size - 1)))


def _gen_context(d: ExperimentDesign, rng) -> TrialSchedule:
    trials, targets, cycles, lists = [], [], [], []
    for c in range(d.cycles):
        tag = "ab"[c % 2]
        words = [w for w in d.list_words(tag) for _ in range(d.repeats)]
        for w in _shuffled(rng, words):
            stim = _list_trial(d, rng, w, tag, d.alternatives)
            trials.append(stim)
            targets.append(d.referent_of(w, tag))
            cycles.append(c)
            lists.append(tag)
    al = {"a": d.referent_a, "b": d.referent_b}
    tests = []
    for k in rng.permutation(len(d.conditions)):
        cond = d.conditions[k]
        induction = []
        for n, tag in cond:
            plain = [w for w in d.list_words(tag) if w != d.ambiguous]
            for w in _pick(rng, plain, n):
                induction.append(_list_trial(d, rng, w, tag, d.induction_alternatives,
                                             exclude=(al[tag],)))
        lures = {}
        for tag in ("a", "b"):
            plain = [d.referent_of(w, tag) for w in d.list_words(tag) if w != d.ambiguous]
            lures[tag] = _pick(rng, plain, 1)[0]
        late = cond[-1][1]
        early = cond[0][1]
        cands = _shuffled(rng, [d.referent_a, d.referent_b, lures["a"], lures["b"]])
        tests.append(TestItem(d.ambiguous, cands, frozenset([al[late]]), kind="ambiguous",
                              early=al[early], late=al[late], condition=condition_label(cond),
                              induction=tuple(induction)))
    return TrialSchedule(d.id, trials, tests, targets, cycles, lists)


def gen_schedule(design: ExperimentDesign, seed: int) -> TrialSchedule:
    rng = np.random.default_rng(seed)
    gen = {"yu_smith": _gen_yu_smith, "yurovsky": _gen_yurovsky,
           "trueswell": _gen_trueswell, "context": _gen_context}[design.kind]
    return gen(design, rng)


# -- independent validation ------------------------------------------------

def validate_schedule(design: ExperimentDesign, sched: TrialSchedule) -> list[str]:
    """Recount a schedule from scratch; return every violated constraint."""
    errs: list[str] = []
    words_ok, refs_ok = set(design.all_words), set(design.all_referents)
    for t, stim in enumerate(sched.trials):
        if len(set(stim.words)) != len(stim.words) or len(set(stim.referents)) != len(stim.referents):
            errs.append(f"trial {t}: repeated word or referent")
        if set(stim.words) - words_ok or set(stim.referents) - refs_ok:
            errs.append(f"trial {t}: word or referent outside the design")
    for i, item in enumerate(sched.tests):
        if len(item.candidates) != 4 or len(set(item.candidates)) != 4:
            errs.append(f"test {i}: needs four distinct candidates")
        if not item.correct <= set(item.candidates):
            errs.append(f"test {i}: a correct referent is missing")
    errs += getattr(_Validator, design.kind)(design, sched)
    return errs


def _word_counts(sched: TrialSchedule) -> Counter:
    return Counter(w for s in sched.trials for w in s.words)


def _pair_counts(sched: TrialSchedule) -> Counter:
    return Counter((w, r) for s in sched.trials for w in s.words for r in s.referents)


class _Validator:
    @staticmethod
    def yu_smith(d, s):
        errs = []
        expected = len(d.words) * d.occurrences // d.trial_size
        if len(s.trials) != expected:
            errs.append(f"{len(s.trials)} trials, expected {expected}")
        for t, stim in enumerate(s.trials):
            if len(stim.words) != d.trial_size or len(stim.referents) != d.trial_size:
                errs.append(f"trial {t}: wrong size")
            if {d.referent_of(w) for w in stim.words} != set(stim.referents):
                errs.append(f"trial {t}: word present without its referent or vice versa")
        counts = _word_counts(s)
        pairs = _pair_counts(s)
        for w in d.words:
            if counts[w] != d.occurrences or pairs[(w, d.referent_of(w))] != d.occurrences:
                errs.append(f"{w}: occurs {counts[w]} times, expected {d.occurrences}")
        if sorted(i.word for i in s.tests) != sorted(d.words):
            errs.append("test words differ from the training words")
        for i in s.tests:
            if i.correct != {d.referent_of(i.word)}:
                errs.append(f"test {i.word}: wrong target")
        return errs

    @staticmethod
    def yurovsky(d, s):
        errs = []
        n_trials = sum(c for c, _ in d.templates)
        if len(s.trials) != n_trials:
            errs.append(f"{len(s.trials)} trials, expected {n_trials}")
        mix = Counter()
        for t, stim in enumerate(s.trials):
            letters = "".join(sorted("S" if w in d.single else "D" if w in d.double else "N"
                                     for w in stim.words))
            mix[letters] += 1
            for w in stim.words:
                if w in d.single and d.referent_of(w) not in stim.referents:
                    errs.append(f"trial {t}: {w} without its referent")
                if w in d.double:
                    present = {d.referent_of(w), d.second_of(w)} & set(stim.referents)
                    want = 2 if d.variant == "both" else 1
                    if len(present) != want:
                        errs.append(f"trial {t}: {w} shows {len(present)} referents, expected {want}")
            expected_refs = ({d.referent_of(w) for w in stim.words if w in d.single}
                             | {r for w in stim.words if w in d.double
                                for r in (d.referent_of(w), d.second_of(w))})
            if not set(stim.referents) <= expected_refs:
                errs.append(f"trial {t}: referent without its word")
        want_mix = Counter()
        for c, letters in d.templates:
            want_mix["".join(sorted(letters))] += c
        if mix != want_mix:
            errs.append(f"trial mix {dict(mix)} differs from {dict(want_mix)}")
        counts = _word_counts(s)
        pairs = _pair_counts(s)
        for w in d.single + d.noise:
            if counts[w] != d.occurrences:
                errs.append(f"{w}: occurs {counts[w]} times, expected {d.occurrences}")
        for w in d.single:
            if pairs[(w, d.referent_of(w))] != d.occurrences:
                errs.append(f"{w}: co-occurs {pairs[(w, d.referent_of(w))]} times with its referent")
        for w in d.double:
            for r in (d.referent_of(w), d.second_of(w)):
                if pairs[(w, r)] != d.occurrences:
                    errs.append(f"{w}: co-occurs {pairs[(w, r)]} times with {r}")
        if d.variant == "ordered":
            items = {i.word: i for i in s.tests}
            for w in d.double:
                item = items.get(w)
                if item is None or item.early is None:
                    errs.append(f"{w}: test lacks early/late labels")
                    continue
                early_t = [t for t, st in enumerate(s.trials) if w in st.words and item.early in st.referents]
                late_t = [t for t, st in enumerate(s.trials) if w in st.words and item.late in st.referents]
                if early_t and late_t and max(early_t) >= min(late_t):
                    errs.append(f"{w}: late referent appears before the early one is exhausted")
        tested = sorted(i.word for i in s.tests)
        if tested != sorted(d.single + d.double):
            errs.append("test words differ from the single and double words")
        for i in s.tests:
            want = ({d.referent_of(i.word), d.second_of(i.word)} if i.word in d.double
                    else {d.referent_of(i.word)})
            if i.correct != want:
                errs.append(f"test {i.word}: wrong correct set")
        return errs

    @staticmethod
    def trueswell(d, s):
        errs = []
        n = len(d.words)
        if len(s.trials) != d.cycles * n:
            errs.append(f"{len(s.trials)} trials, expected {d.cycles * n}")
        orders = [tuple(st.words[0] for st in s.trials[c * n:(c + 1) * n]) for c in range(d.cycles)]
        if any(sorted(o) != sorted(d.words) for o in orders):
            errs.append("a cycle does not present every word once")
        if len(set(orders)) > 1:
            errs.append("word order differs across cycles")
        for t, (st, target) in enumerate(zip(s.trials, s.targets)):
            if len(st.words) != 1 or len(st.referents) != d.alternatives:
                errs.append(f"trial {t}: expected one word and {d.alternatives} referents")
            if target != d.referent_of(st.words[0]) or target not in st.referents:
                errs.append(f"trial {t}: target missing")
        return errs

    @staticmethod
    def context(d, s):
        errs = []
        per_cycle = len(d.list_a) * d.repeats
        if len(s.trials) != d.cycles * per_cycle:
            errs.append(f"{len(s.trials)} trials, expected {d.cycles * per_cycle}")
        for t, st in enumerate(s.trials):
            c = t // per_cycle
            tag = "ab"[c % 2]
            if s.lists[t] != tag:
                errs.append(f"trial {t}: list {s.lists[t]} breaks the alternation")
            pool = {d.referent_of(w, tag) for w in d.list_words(tag)}
            if st.words[0] not in d.list_words(tag) or not set(st.referents) <= pool:
                errs.append(f"trial {t}: items from the wrong list")
            if d.referent_of(st.words[0], tag) not in st.referents:
                errs.append(f"trial {t}: target missing")
            if len(st.referents) != d.alternatives:
                errs.append(f"trial {t}: expected {d.alternatives} referents")
        for c in range(d.cycles):
            counts = Counter(st.words[0] for st in s.trials[c * per_cycle:(c + 1) * per_cycle])
            if set(counts.values()) != {d.repeats}:
                errs.append(f"cycle {c}: words not each shown {d.repeats} times")
        labels = sorted(i.condition or "" for i in s.tests)
        if labels != sorted(condition_label(c) for c in d.conditions):
            errs.append("test conditions differ from the design")
        conds = {condition_label(c): c for c in d.conditions}
        for i in s.tests:
            cond = conds.get(i.condition)
            if cond is None:
                continue
            expect = [tag for n, tag in cond for _ in range(n)]
            got = []
            for st in i.induction:
                w = st.words[0]
                tag = "a" if w in d.list_a else "b"
                got.append(tag)
                if w == d.ambiguous or len(st.referents) != d.induction_alternatives:
                    errs.append(f"{i.condition}: bad induction trial")
            if got != expect:
                errs.append(f"{i.condition}: induction lists {got} differ from {expect}")
            if not {d.referent_a, d.referent_b} <= set(i.candidates):
                errs.append(f"{i.condition}: both ambiguous referents must be candidates")
            late_ref = d.referent_a if cond[-1][1] == "a" else d.referent_b
            if i.correct != {late_ref}:
                errs.append(f"{i.condition}: correct referent must follow the late list")
        return errs


# -- scoring ---------------------------------------------------------------

def score_rank_test(ranked, correct) -> str:
    ranked = list(ranked)
    correct = set(correct)
    if len(ranked) != 4 or len(set(ranked)) != 4:
        raise ValueError("ranked must hold four distinct referents")
    if len(correct) not in (1, 2) or not correct <= set(ranked):
        raise ValueError("correct must be one or two of the ranked referents")
    if len(correct) == 1:
        return "Single" if ranked[0] in correct else "Miss"
    if set(ranked[:2]) == correct:
        return "Double"
    if ranked[0] in correct:
        return "Either"
    return "Miss"


def score_conditional(correct, schedule: TrialSchedule):
    """Accuracy on cycles 2+ split by whether the word was answered right one cycle earlier.

    Returns ``(after_right, after_wrong, per_cycle)``; a split with no trials
    is reported as None.
    """
    correct = list(correct)
    n_cycles = max(schedule.cycles) + 1
    per_cycle = []
    last: dict[str, bool] = {}
    right, wrong = [], []
    for c in range(n_cycles):
        hits = [ok for ok, cc in zip(correct, schedule.cycles) if cc == c]
        per_cycle.append(float(np.mean(hits)) if hits else 0.0)
    for ok, c, stim in zip(correct, schedule.cycles, schedule.trials):
        w = stim.words[0]
        if c > 0 and w in last:
            (right if last[w] else wrong).append(ok)
        last[w] = ok
    mean = lambda xs: float(np.mean(xs)) if xs else None  # noqa: E731
    return mean(right), mean(wrong), per_cycle


def score_order_effect(items: list[TestItem], ranked: list[list[str]], n_double: int | None = None):
    """Early-first and late-first rates among Double outcomes.

    Rates are over all tested double words, so they sum to the Double rate.
    With no Double outcome both are 0 and ``absent`` is True.
    """
    doubles = [(i, r) for i, r in zip(items, ranked) if i.kind == "double"]
    n = n_double or len(doubles)
    early = late = 0
    for item, r in doubles:
        if score_rank_test(r, item.correct) == "Double":
            early += r[0] == item.early
            late += r[0] == item.late
    if n == 0 or early + late == 0:
        return 0.0, 0.0, True
    return early / n, late / n, False


# -- running ---------------------------------------------------------------

# metric name -> chance level, per design kind
METRICS = {
    "yu_smith": {"accuracy": 0.25},
    "yurovsky": {"single": 0.25, "either": 0.5, "both": 1 / 6},
    "ordered": {"early_first": None, "late_first": None},
    "context": {"3+3": 0.25, "4+2": 0.25, "5+1": 0.25},
}


def metric_chances(design: ExperimentDesign) -> dict[str, float | None]:
    if design.kind == "trueswell":
        out = {f"cycle{c + 1}": 1 / design.alternatives for c in range(design.cycles)}
        out.update({"after_right": 1 / design.alternatives, "after_wrong": 1 / design.alternatives})
        out.update({f"created_cycle{c + 1}": None for c in range(design.cycles)})
        return out
    if design.kind == "context":
        return {condition_group(c): 0.25 for c in design.conditions}
    out = dict(METRICS[design.kind])
    if design.variant == "ordered":
        out.update(METRICS["ordered"])
    return out


@dataclass
class ParticipantResult:
    design_id: str
    index: int
    seed: int
    scores: dict[str, float | None]
    outcomes: list[dict] = field(default_factory=list)
    created: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def participant_seed(base_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([base_seed, index]).generate_state(1)[0])


def _ranked_tests(state: ModelState, tests: list[TestItem]) -> list[list[str]]:
    return [state.rank_candidates(i.word, i.candidates) for i in tests]


def run_participant(design: ExperimentDesign, reps: Representations, config: ModelConfig,
                    seed: int, index: int = 0) -> ParticipantResult:
    ss = np.random.SeedSequence(seed)
    sched_seed, model_seed = (int(s.generate_state(1)[0]) for s in ss.spawn(2))
    sched = gen_schedule(design, sched_seed)
    state = ModelState(reps, config, model_seed)
    result = ParticipantResult(design.id, index, seed, {})

    if design.kind == "trueswell":
        correct = []
        for t, stim in enumerate(sched.trials):
            created, scores = state.train_trial(stim, record=True)
            refs = list(scores)
            vals = np.array([scores[r] for r in refs])
            order = np.lexsort((state.rng.random(len(refs)), -vals))
            choice = refs[order[0]]
            ok = choice == sched.targets[t]
            correct.append(ok)
            result.created.append(int(created))
            result.outcomes.append({"trial": t, "cycle": sched.cycles[t] + 1, "word": stim.words[0],
                                    "choice": choice, "target": sched.targets[t],
                                    "correct": bool(ok), "created": int(created)})
        right, wrong, per_cycle = score_conditional(correct, sched)
        for c, acc in enumerate(per_cycle):
            result.scores[f"cycle{c + 1}"] = acc
        result.scores["after_right"] = right
        result.scores["after_wrong"] = wrong
        for c in range(design.cycles):
            made = [n for n, cc in zip(result.created, sched.cycles) if cc == c]
            result.scores[f"created_cycle{c + 1}"] = float(np.mean(made))
        return result

    for stim in sched.trials:
        result.created.append(int(state.train_trial(stim)))

    if design.kind == "context":
        groups: dict[str, list[float]] = {}
        for item in sched.tests:
            for stim in item.induction:
                state.induce(stim)
            ranked = state.rank_candidates(item.word, item.candidates)
            ok = ranked[0] in item.correct
            groups.setdefault(condition_group(_cond_of(design, item.condition)), []).append(ok)
            result.outcomes.append({"word": item.word, "condition": item.condition,
                                    "ranked": ranked, "correct": sorted(item.correct),
                                    "hit": bool(ok), "chose_early": ranked[0] == item.early})
        for g, hits in groups.items():
            result.scores[g] = float(np.mean(hits))
        return result

    ranked = _ranked_tests(state, sched.tests)
    outcomes = []
    for item, r in zip(sched.tests, ranked):
        out = score_rank_test(r, item.correct)
        outcomes.append(out)
        row = {"word": item.word, "kind": item.kind, "ranked": r,
               "correct": sorted(item.correct), "outcome": out}
        if item.early:
            row["early"] = item.early
        result.outcomes.append(row)
    if design.kind == "yu_smith":
        result.scores["accuracy"] = outcomes.count("Single") / len(outcomes)
        return result
    singles = [o for o, i in zip(outcomes, sched.tests) if i.kind == "single"]
    doubles = [o for o, i in zip(outcomes, sched.tests) if i.kind == "double"]
    result.scores["single"] = singles.count("Single") / len(singles)
    result.scores["either"] = sum(o in ("Double", "Either") for o in doubles) / len(doubles)
    result.scores["both"] = doubles.count("Double") / len(doubles)
    if design.variant == "ordered":
        early, late, _ = score_order_effect(sched.tests, ranked)
        result.scores["early_first"] = early
        result.scores["late_first"] = late
    return result


def _cond_of(design: ExperimentDesign, label: str | None):
    for c in design.conditions:
        if condition_label(c) == label:
            return c
    raise DesignError(f"unknown condition {label!r}")


@dataclass
class ExperimentResult:
    design: ExperimentDesign
    seed: int
    config: ModelConfig
    participants: list[ParticipantResult]

    def scores(self, metric: str) -> list[float]:
        return [p.scores[metric] for p in self.participants if p.scores.get(metric) is not None]


def _run_one(args):
    design, reps, config, seed, index = args
    return run_participant(design, reps, config, seed, index)


def run_experiment(design: ExperimentDesign, reps: Representations, config: ModelConfig | None = None,
                   participants: int | None = None, seed: int = 0,
                   workers: int = 1) -> ExperimentResult:
    """Run ``participants`` seeded participants (the design's count by default)."""
    config = config or ModelConfig()
    n = design.participants if participants is None else participants
    if n < 1:
        raise ValueError("participants must be positive")
    jobs = [(design, reps, config, participant_seed(seed, i), i) for i in range(n)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    return ExperimentResult(design, seed, config, results)

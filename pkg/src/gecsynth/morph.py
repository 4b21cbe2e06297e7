"""English inflection tables and rules.

Used in three places: the annotator (lemma recovery), the edit classifier
(form detection), and the corruption inventory (applying morphological
transforms). Everything is table and suffix-rule driven; no statistics.
"""

from __future__ import annotations

# base -> (simple past, past participle)
IRREGULAR_VERBS: dict[str, tuple[str, str]] = {
    "arise": ("arose", "arisen"),
    "awake": ("awoke", "awoken"),
    "be": ("was", "been"),
    "bear": ("bore", "borne"),
    "beat": ("beat", "beaten"),
    "become": ("became", "become"),
    "begin": ("began", "begun"),
    "bend": ("bent", "bent"),
    "bet": ("bet", "bet"),
    "bind": ("bound", "bound"),
    "bite": ("bit", "bitten"),
    "bleed": ("bled", "bled"),
    "blow": ("blew", "blown"),
    "break": ("broke", "broken"),
    "breed": ("bred", "bred"),
    "bring": ("brought", "brought"),
    "broadcast": ("broadcast", "broadcast"),
    "build": ("built", "built"),
    "burn": ("burnt", "burnt"),
    "burst": ("burst", "burst"),
    "buy": ("bought", "bought"),
    "catch": ("caught", "caught"),
    "choose": ("chose", "chosen"),
    "cling": ("clung", "clung"),
    "come": ("came", "come"),
    "cost": ("cost", "cost"),
    "creep": ("crept", "crept"),
    "cut": ("cut", "cut"),
    "deal": ("dealt", "dealt"),
    "dig": ("dug", "dug"),
    "do": ("did", "done"),
    "draw": ("drew", "drawn"),
    "dream": ("dreamt", "dreamt"),
    "drink": ("drank", "drunk"),
    "drive": ("drove", "driven"),
    "eat": ("ate", "eaten"),
    "fall": ("fell", "fallen"),
    "feed": ("fed", "fed"),
    "feel": ("felt", "felt"),
    "fight": ("fought", "fought"),
    "find": ("found", "found"),
    "flee": ("fled", "fled"),
    "fly": ("flew", "flown"),
    "forbid": ("forbade", "forbidden"),
    "forget": ("forgot", "forgotten"),
    "forgive": ("forgave", "forgiven"),
    "freeze": ("froze", "frozen"),
    "get": ("got", "gotten"),
    "give": ("gave", "given"),
    "go": ("went", "gone"),
    "grind": ("ground", "ground"),
    "grow": ("grew", "grown"),
    "hang": ("hung", "hung"),
    "have": ("had", "had"),
    "hear": ("heard", "heard"),
    "hide": ("hid", "hidden"),
    "hit": ("hit", "hit"),
    "hold": ("held", "held"),
    "hurt": ("hurt", "hurt"),
    "keep": ("kept", "kept"),
    "kneel": ("knelt", "knelt"),
    "know": ("knew", "known"),
    "lay": ("laid", "laid"),
    "lead": ("led", "led"),
    "lean": ("leant", "leant"),
    "leap": ("leapt", "leapt"),
    "learn": ("learnt", "learnt"),
    "leave": ("left", "left"),
    "lend": ("lent", "lent"),
    "let": ("let", "let"),
    "lie": ("lay", "lain"),
    "light": ("lit", "lit"),
    "lose": ("lost", "lost"),
    "make": ("made", "made"),
    "mean": ("meant", "meant"),
    "meet": ("met", "met"),
    "pay": ("paid", "paid"),
    "put": ("put", "put"),
    "quit": ("quit", "quit"),
    "read": ("read", "read"),
    "ride": ("rode", "ridden"),
    "ring": ("rang", "rung"),
    "rise": ("rose", "risen"),
    "run": ("ran", "run"),
    "say": ("said", "said"),
    "see": ("saw", "seen"),
    "seek": ("sought", "sought"),
    "sell": ("sold", "sold"),
    "send": ("sent", "sent"),
    "set": ("set", "set"),
    "shake": ("shook", "shaken"),
    "shed": ("shed", "shed"),
    "shine": ("shone", "shone"),
    "shoot": ("shot", "shot"),
    "show": ("showed", "shown"),
    "shrink": ("shrank", "shrunk"),
    "shut": ("shut", "shut"),
    "sing": ("sang", "sung"),
    "sink": ("sank", "sunk"),
    "sit": ("sat", "sat"),
    "sleep": ("slept", "slept"),
    "slide": ("slid", "slid"),
    "speak": ("spoke", "spoken"),
    "speed": ("sped", "sped"),
    "spend": ("spent", "spent"),
    "spin": ("spun", "spun"),
    "spread": ("spread", "spread"),
    "spring": ("sprang", "sprung"),
    "stand": ("stood", "stood"),
    "steal": ("stole", "stolen"),
    "stick": ("stuck", "stuck"),
    "sting": ("stung", "stung"),
    "strike": ("struck", "struck"),
    "swear": ("swore", "sworn"),
    "sweep": ("swept", "swept"),
    "swim": ("swam", "swum"),
    "swing": ("swung", "swung"),
    "take": ("took", "taken"),
    "teach": ("taught", "taught"),
    "tear": ("tore", "torn"),
    "tell": ("told", "told"),
    "think": ("thought", "thought"),
    "throw": ("threw", "thrown"),
    "understand": ("understood", "understood"),
    "wake": ("woke", "woken"),
    "wear": ("wore", "worn"),
    "weep": ("wept", "wept"),
    "win": ("won", "won"),
    "wind": ("wound", "wound"),
    "write": ("wrote", "written"),
}

# singular -> plural
IRREGULAR_PLURALS: dict[str, str] = {
    "analysis": "analyses",
    "appendix": "appendices",
    "basis": "bases",
    "cactus": "cacti",
    "child": "children",
    "crisis": "crises",
    "criterion": "criteria",
    "datum": "data",
    "deer": "deer",
    "diagnosis": "diagnoses",
    "fish": "fish",
    "focus": "foci",
    "foot": "feet",
    "fungus": "fungi",
    "goose": "geese",
    "half": "halves",
    "hypothesis": "hypotheses",
    "knife": "knives",
    "leaf": "leaves",
    "life": "lives",
    "loaf": "loaves",
    "louse": "lice",
    "man": "men",
    "matrix": "matrices",
    "medium": "media",
    "mouse": "mice",
    "oasis": "oases",
    "ox": "oxen",
    "person": "people",
    "phenomenon": "phenomena",
    "radius": "radii",
    "self": "selves",
    "series": "series",
    "sheep": "sheep",
    "shelf": "shelves",
    "species": "species",
    "thesis": "theses",
    "thief": "thieves",
    "tooth": "teeth",
    "wife": "wives",
    "wolf": "wolves",
    "woman": "women",
}

_PLURAL_TO_SINGULAR = {v: k for k, v in IRREGULAR_PLURALS.items()}

# adjective -> (comparative, superlative)
IRREGULAR_COMPARATIVES: dict[str, tuple[str, str]] = {
    "good": ("better", "best"),
    "well": ("better", "best"),
    "bad": ("worse", "worst"),
    "far": ("further", "furthest"),
    "little": ("less", "least"),
    "many": ("more", "most"),
    "much": ("more", "most"),
    "old": ("older", "oldest"),
}

_COMP_TO_BASE = {}
for _base, (_cmp, _sup) in IRREGULAR_COMPARATIVES.items():
    _COMP_TO_BASE.setdefault(_cmp, _base)
    _COMP_TO_BASE.setdefault(_sup, _base)

# Verbs whose final consonant doubles before -ed/-ing.
DOUBLING_VERBS = frozenset(
    {
        "stop", "plan", "shop", "drop", "grab", "hug", "jog", "nod", "rub",
        "chat", "clap", "trip", "skip", "slip", "step", "beg", "rob", "tap",
        "wrap", "scan", "ban", "stir", "occur", "prefer", "refer", "admit",
        "commit", "permit", "submit", "regret", "control", "travel", "cancel",
        "trap", "pat", "pin", "plug", "hop", "mop", "pop", "sob", "trim",
        # irregular bases whose gerund still doubles
        "run", "get", "win", "dig", "spin", "cut", "hit", "let", "put", "set",
        "shut", "quit", "bet", "begin", "forget", "forbid", "shed", "sit",
        "swim",
    }
)

# Adjectives whose final consonant doubles before -er/-est.
DOUBLING_ADJS = frozenset({"big", "hot", "fat", "thin", "sad", "wet", "flat", "fit", "dim"})

# Surfaces that look inflected but must never be suffix-stripped.
STRIP_EXCEPTIONS = frozenset(
    {
        "news", "bus", "lens", "series", "species", "physics", "mathematics",
        "economics", "politics", "athletics", "gas", "chaos", "analysis",
        "basis", "crisis", "tennis", "this", "its", "his", "hers", "ours",
        "yours", "theirs", "always", "perhaps", "during", "thing", "king",
        "ring", "spring", "string", "wing", "morning", "evening", "nothing",
        "something", "anything", "everything", "being", "sibling", "ceiling",
        "building", "feeling", "meeting", "wedding", "clothing",
    }
)

VOWELS = "aeiou"


def _ies_to_y(word: str) -> str:
    return word[:-3] + "y"


def pluralize_noun(singular: str) -> str:
    """Regular pluralization with the irregular table consulted first."""
    w = singular.lower()
    if w in IRREGULAR_PLURALS:
        return IRREGULAR_PLURALS[w]
    if w.endswith(("s", "x", "z", "ch", "sh")):
        return w + "es"
    if w.endswith("y") and len(w) > 1 and w[-2] not in VOWELS:
        return w[:-1] + "ies"
    if w.endswith("fe"):
        return w[:-2] + "ves"
    if w.endswith("f") and not w.endswith("ff"):
        return w[:-1] + "ves"
    return w + "s"


def singularize_noun(plural: str) -> str | None:
    """Inverse of pluralize_noun; None when the surface does not look plural."""
    w = plural.lower()
    if w in _PLURAL_TO_SINGULAR:
        return _PLURAL_TO_SINGULAR[w]
    if w.endswith("ies") and len(w) > 3:
        return _ies_to_y(w)
    if w.endswith("ves") and len(w) > 3:
        stem = w[:-3]
        return stem + "fe" if stem.endswith(("i", "kni", "wi")) else stem + "f"
    if w.endswith("es") and w[:-2].endswith(("s", "x", "z", "ch", "sh")):
        return w[:-2]
    if w.endswith("s") and not w.endswith("ss"):
        return w[:-1]
    return None


def verb_3sg(base: str) -> str:
    w = base.lower()
    special = {"be": "is", "have": "has", "do": "does", "go": "goes"}
    if w in special:
        return special[w]
    if w.endswith(("s", "x", "z", "ch", "sh")):
        return w + "es"
    if w.endswith("y") and len(w) > 1 and w[-2] not in VOWELS:
        return w[:-1] + "ies"
    return w + "s"


def verb_past(base: str) -> str:
    w = base.lower()
    if w in IRREGULAR_VERBS:
        return IRREGULAR_VERBS[w][0]
    if w.endswith("e"):
        return w + "d"
    if w.endswith("y") and len(w) > 1 and w[-2] not in VOWELS:
        return w[:-1] + "ied"
    if w in DOUBLING_VERBS:
        return w + w[-1] + "ed"
    return w + "ed"


def verb_past_participle(base: str) -> str:
    w = base.lower()
    if w in IRREGULAR_VERBS:
        return IRREGULAR_VERBS[w][1]
    return verb_past(w)


def verb_gerund(base: str) -> str:
    w = base.lower()
    if w == "be":
        return "being"
    if w.endswith("ie"):
        return w[:-2] + "ying"
    if w.endswith("e") and not w.endswith(("ee", "oe", "ye")):
        return w[:-1] + "ing"
    if w in DOUBLING_VERBS:
        return w + w[-1] + "ing"
    return w + "ing"


def comparative(adj: str) -> str:
    w = adj.lower()
    if w in IRREGULAR_COMPARATIVES:
        return IRREGULAR_COMPARATIVES[w][0]
    if w.endswith("e"):
        return w + "r"
    if w.endswith("y") and len(w) > 1 and w[-2] not in VOWELS:
        return w[:-1] + "ier"
    if w in DOUBLING_ADJS:
        return w + w[-1] + "er"
    return w + "er"


def superlative(adj: str) -> str:
    w = adj.lower()
    if w in IRREGULAR_COMPARATIVES:
        return IRREGULAR_COMPARATIVES[w][1]
    if w.endswith("e"):
        return w + "st"
    if w.endswith("y") and len(w) > 1 and w[-2] not in VOWELS:
        return w[:-1] + "iest"
    if w in DOUBLING_ADJS:
        return w + w[-1] + "est"
    return w + "est"


def adjective_base(form: str) -> str | None:
    """Base adjective for a comparative/superlative surface, else None."""
    w = form.lower()
    if w in _COMP_TO_BASE:
        return _COMP_TO_BASE[w]
    for suffix, strip in (("ier", 3), ("iest", 4), ("er", 2), ("est", 3)):
        if w.endswith(suffix) and len(w) > strip + 1:
            stem = w[: len(w) - strip]
            if suffix.startswith("i"):
                return stem + "y"
            return stem
    return None


# Verb form labels used by the classifier's form-pair table.
BASE, THIRD_SG, PAST, PAST_PART, GERUND = "base", "3sg", "past", "pp", "gerund"

# Finite forms of "be" need their own mapping; "were" behaves as a plural past
# and pairs with "was" as an agreement (not tense) contrast.
_BE_FORMS = {
    "be": {BASE},
    "am": {BASE},
    "are": {BASE},
    "is": {THIRD_SG},
    "was": {PAST, THIRD_SG},
    "were": {PAST},
    "been": {PAST_PART},
    "being": {GERUND},
}


def verb_forms(surface: str, lemma: str) -> set[str]:
    """Possible inflectional forms of ``surface`` relative to verb ``lemma``.

    Empty set when the surface is not a recognizable form of the lemma.
    """
    w = surface.lower()
    lemma = lemma.lower()
    if lemma == "be":
        return set(_BE_FORMS.get(w, set()))
    forms: set[str] = set()
    if w == lemma:
        forms.add(BASE)
    if w == verb_3sg(lemma):
        forms.add(THIRD_SG)
    if w == verb_past(lemma):
        forms.add(PAST)
    if w == verb_past_participle(lemma):
        forms.add(PAST_PART)
    if w == verb_gerund(lemma):
        forms.add(GERUND)
    return forms


def noun_number(surface: str, lemma: str) -> str | None:
    """'sing', 'plur', or None when the surface is not a form of the noun lemma."""
    w = surface.lower()
    lemma = lemma.lower()
    if w == pluralize_noun(lemma) and w != lemma:
        return "plur"
    if w == lemma:
        return "sing"
    return None

"""Independent reference for the formal headline features.

Regex-based re-implementation used to freeze tests/data/golden_headlines.json.
Run with --check to compare against the checked-in file instead of writing it.
"""
import argparse
import json
import pathlib
import re
import sys

ROOT = pathlib.Path(__file__).resolve().parents[2]
PUNCT = '.,!?;:"\'—'
TOKEN_RE = re.compile(r"[.,!?;:\"'—]|[^\s.,!?;:\"'—]+")

PRONOUNS = set(
    "i me my mine myself you your yours yourself yourselves he him his himself "
    "she her hers herself it its itself we us our ours ourselves they them their "
    "theirs themselves".split()
)
YOU = {"you", "your", "yours", "yourself", "yourselves"}
INTERROGATIVES = set("who what when where why how is are do does can should".split())
DEMONSTRATIVES = {"this", "that", "these", "those"}

HEADLINES = [
    "She Did Not Expect THIS",
    "How To Fix It?",
    "Word",
    "He Said WHOA!",
    "9 things... wow",
    "27 Photos You Must See",
    "The Cat Sat",
    "What Happened Next Will Shock You",
    "Why Are These Kids Smiling?!",
    '"I Can\'t Believe It," She Said.',
    "This Man Lost Everything — Then He Found That",
    "You Won't Believe What This Dog Did",
    "10 Reasons Your Boss Is Wrong. Number 7 Is Shocking!",
    "Those Who Wait Are Rewarded",
    "Is It Time To Quit Sugar?",
    "A Senator Said “No” And Walked Out",
    "How to Make Bread at Home in 2024",
    "NASA Finds Water On Mars",
    "Here's Why Everyone Is Talking About Them",
    "Can We Stop Doing That; Please?",
    "should you worry: doctors weigh in",
    "Wait... What?! Really?",
    "The 3 Words That Changed My Life",
    "Our Planet Is Changing Fast",
    "Do THESE Look Familiar To You",
]


def load_stopwords():
    words = set()
    for line in (ROOT / "data" / "stopwords_en.txt").read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return words


def features(headline, stop):
    tokens = TOKEN_RE.findall(headline)
    words = [t for t in tokens if t not in PUNCT]
    lower = [w.lower() for w in words]
    classes = "".join("T" if t in ".!?" else ("P" if t in PUNCT else "W") for t in tokens)
    sentences = sum(1 for seg in classes.split("T") if "W" in seg)
    caps = any(re.fullmatch(r"[^a-z]*", w) and len(re.findall(r"[A-Za-z]", w)) >= 2 for w in words)
    f = {
        "n_chars": sum(len(t) for t in tokens),
        "n_words": len(words),
        "avg_word_len": sum(len(w) for w in words) / len(words),
        "n_sentences": sentences,
        "n_exclamation": tokens.count("!"),
        "n_question_mark": tokens.count("?"),
        "n_dots": tokens.count("."),
        "contains_number": int(any(re.search(r"\d", w) for w in words)),
        "contains_pronoun": int(bool(PRONOUNS & set(lower))),
        "contains_you": int(bool(YOU & set(lower))),
        "starts_how_to": int(lower[:2] == ["how", "to"]),
        "starts_interrogative": int(lower[0] in INTERROGATIVES),
        "contains_quote": int('"' in tokens or bool(re.search("[“”]", headline))),
        "stopword_ratio": sum(1 for w in lower if w in stop) / len(words),
        "forward_reference": int(bool(DEMONSTRATIVES & set(lower))),
        "all_caps_word": int(caps),
    }
    return {k: float(v) for k, v in f.items()}


def headline_type(headline):
    tokens = TOKEN_RE.findall(headline)
    lower = [t.lower() for t in tokens if t not in PUNCT]
    if lower[:2] == ["how", "to"]:
        return "howto"
    if re.fullmatch(r"\d+", tokens[0]):
        return "number"
    if tokens[-1] == "?" or tokens[0].lower() in INTERROGATIVES:
        return "question"
    if {"you", "your"} & set(lower):
        return "reader"
    return "normal"


def build():
    stop = load_stopwords()
    return [
        {"headline": h, "type": headline_type(h), "features": features(h, stop)} for h in HEADLINES
    ]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--check", action="store_true")
    args = parser.parse_args()
    path = ROOT / "tests" / "data" / "golden_headlines.json"
    cases = build()
    if args.check:
        frozen = json.loads(path.read_text(encoding="utf-8"))
        if frozen != cases:
            print("golden file differs from oracle output", file=sys.stderr)
            return 1
        print(f"{len(cases)} golden headlines agree with the oracle")
        return 0
    path.write_text(json.dumps(cases, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())

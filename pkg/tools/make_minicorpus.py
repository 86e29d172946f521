"""Generate the bundled question-answering mini-corpus.

Every story has five sentences and four single-sentence questions.  Three
questions target an apposition, an adjectival complement and a coordinated
subject; the fourth is a plain transitive control.  Trees are written by
template, so the parses are exact.

    python tools/make_minicorpus.py src/propsconv/data/minicorpus
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

CAST = [
    # A, role, X, Y, B, adj, C, D, E, food1, food2
    ("John", "baker", "Mary", "Sue", "Tom", "happy", "Ann", "Rick", "Bill", "pizza", "pasta"),
    ("Emma", "teacher", "Paul", "Nina", "Leo", "tired", "Kate", "Omar", "Ivan", "soup", "bread"),
    ("Carl", "pilot", "Rosa", "Lily", "Adam", "angry", "Beth", "Hugo", "Finn", "rice", "cake"),
    ("Dana", "doctor", "Eric", "Zoe", "Max", "calm", "Ruth", "Sam", "Ted", "fish", "salad"),
    ("Gina", "farmer", "Alex", "Ella", "Ben", "proud", "Cleo", "Jack", "Kurt", "corn", "cheese"),
    ("Hank", "painter", "Iris", "Mona", "Ned", "sleepy", "Olga", "Pete", "Raul", "plums", "honey"),
    ("Jane", "singer", "Karl", "Lena", "Mark", "nervous", "Nora", "Otto", "Phil", "tea", "coffee"),
    ("Luke", "driver", "Mia", "Nell", "Owen", "cheerful", "Pam", "Quin", "Rex", "apples", "pears"),
    ("Maya", "nurse", "Noah", "Opal", "Pia", "quiet", "Rene", "Seth", "Troy", "beans", "eggs"),
    ("Vera", "writer", "Walt", "Xena", "Yuri", "excited", "Zack", "Abby", "Boyd", "milk", "juice"),
]


def _noun(word: str) -> tuple[str, str]:
    if word.endswith("s"):
        return word[:-1], "NNS"
    return word, "NN"


def sentence(sid: str, rows: list[tuple]) -> str:
    lines = [f"# sent_id = {sid}"]
    for i, (form, lemma, tag, head, rel) in enumerate(rows, start=1):
        lines.append("\t".join([str(i), form, lemma, tag, tag, "_", str(head), rel]))
    return "\n".join(lines) + "\n"


def story_trees(sid, A, role, X, Y, B, adj, C, D, E, f1, f2):
    l1, t1 = _noun(f1)
    l2, t2 = _noun(f2)
    return [
        sentence(f"{sid}.s1", [(A, A, "NNP", 6, "nsubj"), (",", ",", ",", 1, "punct"),
                              ("the", "the", "DT", 4, "det"), (role, role, "NN", 1, "appos"),
                              (",", ",", ",", 1, "punct"), ("loves", "love", "VBZ", 0, "root"),
                              (X, X, "NNP", 6, "dobj"), (".", ".", ".", 6, "punct")]),
        sentence(f"{sid}.s2", [(Y, Y, "NNP", 2, "nsubj"), ("loves", "love", "VBZ", 0, "root"),
                              ("the", "the", "DT", 4, "det"), (role, role, "NN", 2, "dobj"),
                              (".", ".", ".", 2, "punct")]),
        sentence(f"{sid}.s3", [(B, B, "NNP", 2, "nsubj"), ("looked", "look", "VBD", 0, "root"),
                              (adj, adj, "JJ", 2, "acomp"), ("to", "to", "TO", 2, "prep"),
                              (C, C, "NNP", 4, "pobj"), (".", ".", ".", 2, "punct")]),
        sentence(f"{sid}.s4", [(D, D, "NNP", 4, "nsubj"), ("and", "and", "CC", 1, "cc"),
                              (E, E, "NNP", 1, "conj"), ("like", "like", "VBP", 0, "root"),
                              (f1, l1, t1, 4, "dobj"), (".", ".", ".", 4, "punct")]),
        sentence(f"{sid}.s5", [(C, C, "NNP", 2, "nsubj"), ("likes", "like", "VBZ", 0, "root"),
                              (f2, l2, t2, 2, "dobj"), (".", ".", ".", 2, "punct")]),
    ]


def loves(sid, role, obj):
    return sentence(sid, [("The", "the", "DT", 2, "det"), (role, role, "NN", 3, "nsubj"),
                          ("loves", "love", "VBZ", 0, "root"), (obj, obj, "NNP", 3, "dobj")])


def was(sid, who, adj):
    return sentence(sid, [(who, who, "NNP", 3, "nsubj"), ("was", "be", "VBD", 3, "cop"),
                          (adj, adj, "JJ", 0, "root")])


def likes(sid, who, food):
    lemma, tag = _noun(food)
    return sentence(sid, [(who, who, "NNP", 2, "nsubj"), ("likes", "like", "VBZ", 0, "root"),
                          (food, lemma, tag, 2, "dobj")])


FILLER_FOODS = ("tea", "rice", "milk", "corn")


def _other_foods(*taken: str) -> list[str]:
    return [f for f in FILLER_FOODS if f not in taken][:2]


def place(trap: str, correct: str, fillers: list[str], slot: int) -> tuple[list[str], int]:
    """Trap first, the correct answer at ``slot`` (1..3), fillers elsewhere."""
    order = [trap] + fillers
    order.insert(slot, correct)
    return order, slot


def build(n_stories: int = len(CAST)):
    conll, items = [], []
    for k, cast in enumerate(CAST[:n_stories], start=1):
        A, role, X, Y, B, adj, C, D, E, f1, f2 = cast
        sid = f"mc{k:02d}"
        conll.extend(story_trees(sid, *cast))
        story = [f"{sid}.s{i}" for i in range(1, 6)]
        slot = 1 + (k - 1) % 3
        questions = [
            ("apposition", f"Who does the {role} love?",
             *place(("loves", role, Y), ("loves", role, X), [("loves", role, C), ("loves", role, D)], slot)),
            ("adjectival complement", f"Who was {adj}?",
             *place(("was", C, adj), ("was", B, adj), [("was", D, adj), ("was", E, adj)], slot)),
            ("coordination", f"What does {D} like?",
             *place(("likes", D, f2), ("likes", D, f1), [("likes", D, f) for f in _other_foods(f1, f2)], slot)),
            ("control", f"Who likes {f2}?",
             *place(("likes", B, f2), ("likes", C, f2), [("likes", A, f2), ("likes", E, f2)], slot)),
        ]
        for j, (phenomenon, question, cands, gold) in enumerate(questions, start=1):
            qid = f"{sid}.q{j}"
            cand_ids, texts = [], []
            for m, (verb, who, what) in enumerate(cands, start=1):
                cid = f"{qid}.a{m}"
                cand_ids.append(cid)
                if verb == "loves":
                    conll.append(loves(cid, who, what))
                    texts.append(f"The {who} loves {what}")
                elif verb == "was":
                    conll.append(was(cid, who, what))
                    texts.append(f"{who} was {what}")
                else:
                    conll.append(likes(cid, who, what))
                    texts.append(f"{who} likes {what}")
            items.append({"id": qid, "question": question, "story": story,
                          "candidates": cand_ids, "candidate_text": texts,
                          "answer": gold, "phenomenon": phenomenon})
    return "\n".join(conll), items


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    out = Path(argv[0] if argv else "src/propsconv/data/minicorpus")
    out.mkdir(parents=True, exist_ok=True)
    conll, items = build()
    (out / "minicorpus.conll").write_text(conll, encoding="utf-8")
    with open(out / "minicorpus.jsonl", "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(item, sort_keys=True) + "\n")
    print(f"wrote {len(items)} questions over {len(items) // 4} stories to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

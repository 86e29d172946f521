"""Expand the compact tree notation used for hand-authoring into CoNLL-X.

Each sentence starts with ``@ <sent_id>``; each token line is
``form lemma TAG head relation`` separated by whitespace.
"""

import sys


def expand(text):
    out = []
    index = 0
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@"):
            if index:
                out.append("")
            out.append(f"# sent_id = {line[1:].strip()}")
            index = 0
            continue
        form, lemma, tag, head, rel = line.split()
        index += 1
        out.append("\t".join([str(index), form, lemma, tag, tag, "_", head, rel]))
    out.append("")
    return "\n".join(out) + "\n"


if __name__ == "__main__":
    sys.stdout.write(expand(sys.stdin.read()))

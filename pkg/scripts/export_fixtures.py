"""Regenerate the fixture files that mirror objects built in code.

    python scripts/export_fixtures.py [--out DIR]

Writes ``magnus.gg`` (the Magnus-pair graph with the frozen strict map) and
``cdouble.gg`` (the double along [x,y]).  The test suite checks that the
shipped files still match the constructions.
"""

import argparse
from pathlib import Path

from serrelab.constructions import F2, c_double, magnus_pair_gog
from serrelab.dsl import AlphabetDecl, Document, HomDecl, document_from_graph, render
from serrelab.gog import pi1_presentation

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "serrelab" / "fixtures"


def magnus_document() -> Document:
    f = magnus_pair_gog()
    doc = document_from_graph(f.graph)
    rho = f.rho
    target = AlphabetDecl(rho.target.name, rho.target.generators)
    names = pi1_presentation(f.graph).alphabet.generators
    hom = HomDecl("rho", f.graph.name, rho.target.name, tuple((n, rho.images[n]) for n in names))
    return Document(doc.decls + (target, hom))


def cdouble_document() -> Document:
    return document_from_graph(c_double(F2.gen("x") * F2.gen("y") * ~F2.gen("x") * ~F2.gen("y")).graph)


HEADERS = {
    "magnus.gg": "# Magnus-pair graph of groups and the frozen strict map rho onto F3.\n",
    "cdouble.gg": "# Double of F(x,y) along w = [x,y].\n",
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args()
    for name, doc in (("magnus.gg", magnus_document()), ("cdouble.gg", cdouble_document())):
        path = args.out / name
        path.write_text(HEADERS[name] + render(doc))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()

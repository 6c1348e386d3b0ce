import random
from importlib import resources

import pytest
from hypothesis import given, strategies as st

from docgen import random_document
from serrelab import dsl
from serrelab.constructions import magnus_pair_graph
from serrelab.dsl import ParseError, parse, parse_word, render
from serrelab.words import Alphabet

FIXTURES = sorted(p.name for p in (resources.files("serrelab") / "fixtures").iterdir() if p.name.endswith(".gg"))


def fixture_text(name):
    return (resources.files("serrelab") / "fixtures" / name).read_text()


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_round_trip(name):
    doc = parse(fixture_text(name))
    text = render(doc)
    assert parse(text) == doc
    assert render(parse(text)) == text


@pytest.mark.parametrize("seed", range(200))
def test_generated_round_trip(seed):
    text = random_document(random.Random(seed))
    doc = parse(text)
    out = render(doc)
    assert parse(out) == doc
    assert render(parse(out)) == out


@given(st.integers(0, 10**6), st.data())
def test_stray_character_is_located(seed, data):
    text = render(parse(random_document(random.Random(seed))))
    pos = data.draw(st.integers(0, len(text) - 1))
    bad = text[:pos] + "@" + text[pos:]
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    with pytest.raises(ParseError) as err:
        parse(bad)
    assert (err.value.line, err.value.col) == (line, col)


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("alphabet F { a, b, a }\n", 1, 20),
        ("alphabet F { a }\nword w in F = a c\n", 2, 17),
        ("alphabet F { a }\nword w in G = a\n", 2, 11),
        ("alphabet F { a, b }\nhom h : F -> F {\n  a => b\n}\n", 4, 1),
        ("alphabet F { a }\ntask separate F set { a }\n", 2, 15),
        ("alphabet F { a }\ntower T {\n  base F\n  level abelian attach a rank 0\n}\n", 4, 31),
        ("graf X {}\n", 1, 1),
    ],
)
def test_error_positions(text, line, col):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert (err.value.line, err.value.col) == (line, col), str(err.value)


def test_duplicate_generator_message():
    with pytest.raises(ParseError, match="repeated generator 'a'"):
        parse("alphabet F { a, b, a }\n")


def test_word_syntax():
    A = Alphabet("F", ("x", "y"))
    assert str(parse_word("[x,y]^2", A)) == "x y x^-1 y^-1 x y x^-1 y^-1"
    assert str(parse_word("(x y)^-1 x", A)) == "y^-1"
    assert parse_word("1", A).is_identity()
    with pytest.raises(ParseError):
        parse_word("x z", A)


def test_named_words_expand():
    doc = parse("alphabet F { x, y }\nword w in F = [x,y]\nword v in F = w^2 x\n")
    assert str(doc.find("word", "v").word) == "x y x^-1 y^-1 x y x^-1 y^-1 x"


def test_graph_building_and_render_of_engine_graph():
    g = magnus_pair_graph()
    doc = dsl.document_from_graph(g)
    again = parse(render(doc))
    assert again == doc
    built = again.graph(g.name)
    assert built.edges == g.edges
    assert [v.name for v in built.vertices] == [v.name for v in g.vertices]


def test_invalid_graph_is_rejected_on_build():
    doc = parse("alphabet F { a }\ngraph X {\n  vertex P = free F\n  edge e : P.(a) -- P.(a) tree\n  base P\n}\n")
    with pytest.raises(ValueError):
        doc.graph("X")


def test_tasks_get_default_names():
    doc = parse(fixture_text("centralizer.gg") + "task discriminate T set { t }\n")
    assert doc.tasks[-1].name == f"discriminate{len(doc.tasks)}"


def test_tower_declaration_builds():
    doc = parse(fixture_text("towers.gg"))
    t = doc.tower("Ice")
    assert t.height == 2 and t.user_alphabet.generators == ("a", "b", "t", "s")
    q = doc.tower("Quad")
    assert q.user_alphabet.generators == ("a", "b", "x1", "y1", "x2", "y2")

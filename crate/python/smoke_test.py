"""Smoke test for the tracer Python bindings.

Build first:  pip install maturin && maturin develop -m crates/python/Cargo.toml
Run:          python python/smoke_test.py
"""

import pathlib

import tracer

ROOT = pathlib.Path(__file__).resolve().parent.parent
ZOOM_INT = "GeomKernel.CmdsCleanup.CleanupControl.ZoomOut(int,bool)"
ZOOM_OBJ = "GeomKernel.CmdsCleanup.CleanupControl.ZoomOut(object,EventArgs)"


def main():
    tokens = tracer.tokenize("class C { int x = 1; }")
    assert tokens[0] == ("Keyword", "class", 1, 1), tokens[0]

    src = (ROOT / "corpus" / "cleanup.cs").read_text()
    ir = tracer.source_to_ir("cleanup.cs", src)
    assert ir.startswith("<"), ir[:40]

    kb = tracer.extract([ir])
    assert (kb.object_count(), kb.link_count()) == (16, 20), kb
    assert kb == tracer.KnowledgeBase.from_xml(kb.to_xml())

    visible = kb.visible_set([ZOOM_INT], max_depth=1)
    assert sum(len(v) for v in visible.values()) == 9, visible

    nodes = kb.expand([ZOOM_OBJ])
    calls = [n for n in nodes if n["nodeKind"] == "CallEntry"]
    assert calls and calls[0]["objectId"] == ZOOM_INT, calls
    assert kb.expand([ZOOM_OBJ, ZOOM_INT]) == kb.expand([ZOOM_INT])

    assert kb.reverse_related([ZOOM_INT], "Method") == [ZOOM_OBJ]
    assert ZOOM_OBJ in kb.attributes(ZOOM_INT)["calledBy"]

    try:
        kb.expand([])
    except ValueError:
        pass
    else:
        raise AssertionError("empty path should not expand")
    try:
        kb.visible_set(["missing"])
    except KeyError:
        pass
    else:
        raise AssertionError("unknown id should raise")

    print("smoke test ok:", kb)


if __name__ == "__main__":
    main()

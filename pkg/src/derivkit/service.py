"""HTTP editing service.

Each session holds one document plus its verification report; every edit is
validated, applied, re-verified incrementally, and answered with the full
session state.  A rejected edit changes nothing and reports why.

In silent feedback mode per-node statuses are renamed (resolved, unresolved,
indeterminate) and error details are withheld; open obligations and the
overall tree status stay visible.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

from fastapi import Body, FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import document as d
from .errors import (
    BadPath,
    DerivError,
    NothingToRedo,
    NothingToUndo,
    UnknownCategory,
    UnknownNode,
    UnknownRule,
    UnknownSession,
    UnknownSubtree,
    UnknownSystem,
)
from .parser import ParseError, parse_document, parse_judgment, parse_term
from .report import report_json
from .rules import DocLine, RuleDoc, list_rules, locus_str, rule_doc
from .systems import get_system
from .terms import JHole, KIND_ENTAIL, sort_at
from .verify import (
    DocReport,
    Incorrect,
    Indeterminate,
    apply_edit,
    status_name,
    verify_document,
)
from .printer import print_judgment, print_term

_NOT_FOUND = (UnknownSession, UnknownNode, UnknownRule, UnknownSubtree,
              UnknownSystem, UnknownCategory)

_SILENT_STATUS = {"correct": "resolved", "incorrect": "unresolved",
                  "indeterminate": "indeterminate"}


@dataclass
class Session:
    id: str
    doc: d.DerivationDoc
    report: DocReport
    undo: list = field(default_factory=list)
    redo: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        self._counter = 0

    def create(self, doc: d.DerivationDoc) -> Session:
        with self._lock:
            self._counter += 1
            s = Session(f"s{self._counter}", doc, verify_document(doc))
            self._sessions[s.id] = s
            return s

    def get(self, session_id: str) -> Session:
        s = self._sessions.get(session_id)
        if s is None:
            raise UnknownSession(session_id)
        return s


# --------------------------------------------------------------------------
# payload rendering


def _node_payload(doc: d.DerivationDoc, node: d.DerivNode, report: DocReport,
                  silent: bool) -> dict:
    applied = node.applied
    if isinstance(applied, d.RuleApp):
        applied_json = {"kind": "rule", "name": applied.name}
    elif isinstance(applied, d.SubtreeUse):
        applied_json = {"kind": "subtree", "name": applied.name}
    else:
        applied_json = {"kind": "hole"}

    status = report.statuses[node.id]
    name = status_name(status)
    errors = []
    obligations = []
    if isinstance(status, Incorrect) and not silent:
        errors = [{
            "locus": locus_str(e.locus),
            "path": list(e.path),
            "expected": e.expected,
            "found": e.found,
            "message": e.message,
        } for e in status.errors]
    if isinstance(status, Indeterminate):
        obligations = [{
            "locus": locus_str(o.locus),
            "paths": [list(p) for p in o.paths],
            "statement": o.statement,
        } for o in status.obligations]

    return {
        "id": node.id,
        "path": d.node_path_name(doc, node.id),
        "judgment": print_judgment(node.judgment),
        "applied": applied_json,
        "children": [c.id for c in node.children],
        "status": _SILENT_STATUS[name] if silent else name,
        "errors": errors,
        "obligations": obligations,
    }


def _state_payload(s: Session) -> dict:
    doc, report = s.doc, s.report
    silent = doc.feedback == d.FEEDBACK_SILENT
    nodes = {}
    for _, node in d.iter_nodes(doc):
        nodes[node.id] = _node_payload(doc, node, report, silent)
    return {
        "session": s.id,
        "system": doc.system_id,
        "feedback": doc.feedback,
        "tree_status": report.tree_status,
        "summaries": dict(report.summaries),
        "prelude": [{"name": a.name, "term": print_term(a.term)} for a in doc.prelude],
        "subtrees": [{"name": sd.name, "root": sd.tree.id} for sd in doc.subtrees],
        "root": doc.root.id,
        "nodes": nodes,
        "can_undo": bool(s.undo),
        "can_redo": bool(s.redo),
    }


def _doc_line_payload(line: DocLine) -> dict:
    return {
        "part": line.part,
        "text": line.text,
        "spans": [{
            "text": sp.text,
            "path": list(sp.path),
            "metavar": sp.metavar,
            "color": sp.color,
            "bound": sp.bound,
        } for sp in line.spans],
    }


def _rule_doc_payload(doc: RuleDoc) -> dict:
    return {
        "name": doc.name,
        "category": doc.category,
        "doc_text": doc.doc_text,
        "conclusion": _doc_line_payload(doc.conclusion),
        "premises": [_doc_line_payload(p) for p in doc.premises],
        "side_conditions": [_doc_line_payload(sc) for sc in doc.side_conditions],
    }


# --------------------------------------------------------------------------
# edit command decoding

_TERMLESS = {
    "SetRule": lambda p: d.SetRule(_s(p, "node"), _s(p, "rule")),
    "ClearRule": lambda p: d.ClearRule(_s(p, "node")),
    "AddPremise": lambda p: d.AddPremise(_s(p, "node"), _i(p, "position")),
    "RemovePremise": lambda p: d.RemovePremise(_s(p, "node"), _i(p, "position")),
    "MakeHole": lambda p: d.MakeHole(_s(p, "node"), _path(p)),
    "RemoveAbbrev": lambda p: d.RemoveAbbrev(_s(p, "name")),
    "DefineSubtree": lambda p: d.DefineSubtree(_s(p, "name")),
    "RemoveSubtree": lambda p: d.RemoveSubtree(_s(p, "name")),
    "InsertSubtreeRef": lambda p: d.InsertSubtreeRef(_s(p, "node"), _s(p, "subtree")),
    "SetFeedback": lambda p: d.SetFeedback(_s(p, "flag")),
}


class BadRequest(DerivError):
    def __init__(self, message: str):
        super().__init__(message)

    @property
    def code(self) -> str:
        return "BadRequest"


def _s(payload: dict, key: str) -> str:
    v = payload.get(key)
    if not isinstance(v, str):
        raise BadRequest(f"field {key!r} must be a string")
    return v


def _i(payload: dict, key: str) -> int:
    v = payload.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise BadRequest(f"field {key!r} must be an integer")
    return v


def _path(payload: dict) -> tuple:
    v = payload.get("path")
    if not isinstance(v, list) or not all(isinstance(x, int) and x >= 0 for x in v):
        raise BadRequest("field 'path' must be a list of child indices")
    return tuple(v)


def _decode_command(doc: d.DerivationDoc, payload: dict) -> d.EditCommand:
    kind = _s(payload, "command")
    system = get_system(doc.system_id)

    simple = _TERMLESS.get(kind)
    if simple is not None:
        return simple(payload)

    if kind == "SetJudgment":
        text = _s(payload, "judgment").strip()
        j = JHole() if text == "?" else parse_judgment(text, system.kind)
        return d.SetJudgment(_s(payload, "node"), j)

    if kind in ("EditJudgment", "FillHole"):
        node_id = _s(payload, "node")
        path = _path(payload)
        _, node = d.find_node(doc, node_id)
        if isinstance(node.judgment, JHole):
            raise BadRequest("the judgment is a hole; set it first")
        try:
            sort = sort_at(node.judgment, path)
        except (IndexError, KeyError):
            raise BadPath(f"no position {list(path)} in this judgment") from None
        term = parse_term(_s(payload, "term"), sort)
        cls = d.EditJudgment if kind == "EditJudgment" else d.FillHole
        return cls(node_id, path, term)

    if kind == "DefineAbbrev":
        text = _s(payload, "term")
        kinds = (("ctx.logic", "prop") if system.kind == KIND_ENTAIL
                 else ("ctx.typing", "type", "expr"))
        term = None
        last: Optional[ParseError] = None
        for k in kinds:
            try:
                term = parse_term(text, k)
                break
            except ParseError as e:
                if last is None or e.progress >= last.progress:
                    last = e
        if term is None:
            assert last is not None
            raise last
        return d.DefineAbbrev(_s(payload, "name"), term)

    raise BadRequest(f"unknown command {kind!r}")


# --------------------------------------------------------------------------
# application


def create_app() -> FastAPI:
    app = FastAPI(title="derivkit", docs_url=None, redoc_url=None)
    # the browser editor may be served from any static host
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    store = SessionStore()

    @app.exception_handler(DerivError)
    async def _deriv_error(request: Request, exc: DerivError):
        status = 404 if isinstance(exc, _NOT_FOUND) else 400
        body = {"error": exc.code, "message": str(exc)}
        if isinstance(exc, ParseError):
            body["span"] = {
                "line": exc.span.line, "col": exc.span.col,
                "end_line": exc.span.end_line, "end_col": exc.span.end_col,
            }
        return JSONResponse(status_code=status, content=body)

    @app.post("/sessions")
    def create_session(payload: dict = Body(...)):
        if "document" in payload:
            doc = parse_document(_s(payload, "document"))
        elif "system" in payload:
            doc = d.new_document(_s(payload, "system"))
        else:
            raise BadRequest("provide 'system' or 'document'")
        return _state_payload(store.create(doc))

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        s = store.get(session_id)
        with s.lock:
            return _state_payload(s)

    @app.post("/sessions/{session_id}/edits")
    def post_edit(session_id: str, payload: dict = Body(...)):
        s = store.get(session_id)
        with s.lock:
            cmd = _decode_command(s.doc, payload)
            new_doc, new_report, _ = apply_edit(s.doc, cmd, s.report)
            s.undo.append((s.doc, s.report))
            s.redo.clear()
            s.doc, s.report = new_doc, new_report
            return _state_payload(s)

    @app.post("/sessions/{session_id}/undo")
    def post_undo(session_id: str):
        s = store.get(session_id)
        with s.lock:
            if not s.undo:
                raise NothingToUndo()
            s.redo.append((s.doc, s.report))
            s.doc, s.report = s.undo.pop()
            return _state_payload(s)

    @app.post("/sessions/{session_id}/redo")
    def post_redo(session_id: str):
        s = store.get(session_id)
        with s.lock:
            if not s.redo:
                raise NothingToRedo()
            s.undo.append((s.doc, s.report))
            s.doc, s.report = s.redo.pop()
            return _state_payload(s)

    @app.get("/sessions/{session_id}/rules")
    def get_rules(session_id: str, query: str = "", category: Optional[str] = None):
        s = store.get(session_id)
        system = get_system(s.doc.system_id)
        out = []
        for r in list_rules(system, query, category):
            rd = rule_doc(r)
            out.append({
                "name": r.name,
                "category": r.category,
                "doc_text": r.doc_text,
                "arity": r.arity,
                "conclusion": rd.conclusion.text,
                "premises": [p.text for p in rd.premises],
                "side_conditions": [sc.text for sc in rd.side_conditions],
            })
        return {"system": system.id, "rules": out}

    @app.get("/sessions/{session_id}/doc")
    def get_doc(session_id: str, rule: Optional[str] = None, node: Optional[str] = None):
        s = store.get(session_id)
        system = get_system(s.doc.system_id)
        with s.lock:
            if node is not None:
                _, n = d.find_node(s.doc, node)
                if not isinstance(n.applied, d.RuleApp):
                    raise BadRequest("node has no rule applied")
                r = system.get(n.applied.name)
                status = s.report.statuses[n.id]
                payload = _rule_doc_payload(rule_doc(r, status.bindings))
                links = []
                if isinstance(status, Incorrect) and s.doc.feedback != d.FEEDBACK_SILENT:
                    for e in status.errors:
                        if e.pattern_path is not None:
                            links.append({
                                "locus": locus_str(e.locus),
                                "pattern_path": list(e.pattern_path),
                                "message": e.message,
                            })
                payload["links"] = links
                return payload
            if rule is not None:
                return _rule_doc_payload(rule_doc(system.get(rule)))
            raise BadRequest("provide 'rule' or 'node'")

    @app.get("/sessions/{session_id}/export")
    def get_export(session_id: str):
        s = store.get(session_id)
        with s.lock:
            return {"text": d.print_document(s.doc),
                    "report": report_json(s.doc, s.report)}

    return app

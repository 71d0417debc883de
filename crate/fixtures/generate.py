#!/usr/bin/env python3
"""Regenerates the Childsnack and Spanner fixtures.

Each agent is a small scripted policy. Plans are simulated here with a
minimal STRIPS interpreter, so the shipped traces do not depend on the Rust
code that later replays the plans.

Usage: python3 fixtures/generate.py
"""

import json
import shutil
from pathlib import Path

ROOT = Path(__file__).resolve().parent

# ---------------------------------------------------------------- STRIPS


def ground(schemas, name, args):
    params, pre, add, dele = schemas[name]
    sub = dict(zip(params, args))

    def inst(atoms):
        return {" ".join([a[0]] + [sub.get(x, x) for x in a[1:]]) for a in atoms}

    return inst(pre), inst(add), inst(dele)


def simulate(schemas, init, plan):
    states = [set(init)]
    for name, *args in plan:
        pre, add, dele = ground(schemas, name, args)
        s = states[-1]
        missing = pre - s
        assert not missing, f"{name} {args}: missing {missing}"
        states.append((s - dele) | add)
    return states


def write_trace(path, instance, rel_instance, states):
    doc = {
        "instance": instance,
        "instance_file": rel_instance,
        "states": [sorted(s) for s in states],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def write_plan(path, plan):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"({' '.join(step)})\n" for step in plan))


def pddl_problem(name, domain, objects, init, goal):
    objs = "\n".join(f"    {' '.join(names)} - {ty}" for ty, names in objects if names)
    ini = "\n".join(f"    ({f})" for f in init)
    gl = "\n".join(f"      ({f})" for f in goal)
    return (
        f"(define (problem {name})\n  (:domain {domain})\n  (:objects\n{objs})\n"
        f"  (:init\n{ini})\n  (:goal (and\n{gl})))\n"
    )


# ------------------------------------------------------------ Childsnack

CHILDSNACK_DOMAIN = """(define (domain childsnack)
  (:requirements :strips :typing)
  (:types child bread content sandwich tray place - object
          kitchen - place)
  (:predicates
    (at_kitchen_bread ?b - bread)
    (at_kitchen_content ?c - content)
    (at_kitchen_sandwich ?s - sandwich)
    (no_gluten_bread ?b - bread)
    (no_gluten_content ?c - content)
    (no_gluten_sandwich ?s - sandwich)
    (on ?s - sandwich ?t - tray)
    (allergic_gluten ?c - child)
    (not_allergic_gluten ?c - child)
    (served ?c - child)
    (waiting ?c - child ?p - place)
    (at ?t - tray ?p - place)
    (notprepared ?s - sandwich))

  (:action make_sandwich_no_gluten
    :parameters (?s - sandwich ?b - bread ?c - content)
    :precondition (and (at_kitchen_bread ?b) (at_kitchen_content ?c)
                       (no_gluten_bread ?b) (no_gluten_content ?c) (notprepared ?s))
    :effect (and (not (at_kitchen_bread ?b)) (not (at_kitchen_content ?c))
                 (at_kitchen_sandwich ?s) (no_gluten_sandwich ?s) (not (notprepared ?s))))

  (:action make_sandwich
    :parameters (?s - sandwich ?b - bread ?c - content)
    :precondition (and (at_kitchen_bread ?b) (at_kitchen_content ?c) (notprepared ?s))
    :effect (and (not (at_kitchen_bread ?b)) (not (at_kitchen_content ?c))
                 (at_kitchen_sandwich ?s) (not (notprepared ?s))))

  (:action put_on_tray
    :parameters (?s - sandwich ?t - tray ?k - kitchen)
    :precondition (and (at_kitchen_sandwich ?s) (at ?t ?k))
    :effect (and (not (at_kitchen_sandwich ?s)) (on ?s ?t)))

  (:action serve_sandwich_no_gluten
    :parameters (?s - sandwich ?c - child ?t - tray ?p - place)
    :precondition (and (allergic_gluten ?c) (on ?s ?t) (waiting ?c ?p)
                       (no_gluten_sandwich ?s) (at ?t ?p))
    :effect (and (not (on ?s ?t)) (served ?c)))

  (:action serve_sandwich
    :parameters (?s - sandwich ?c - child ?t - tray ?p - place)
    :precondition (and (not_allergic_gluten ?c) (waiting ?c ?p) (on ?s ?t) (at ?t ?p))
    :effect (and (not (on ?s ?t)) (served ?c)))

  (:action move_tray
    :parameters (?t - tray ?p1 ?p2 - place)
    :precondition (at ?t ?p1)
    :effect (and (not (at ?t ?p1)) (at ?t ?p2))))
"""

CS_SCHEMAS = {
    "make_sandwich_no_gluten": (
        ["?s", "?b", "?c"],
        [("at_kitchen_bread", "?b"), ("at_kitchen_content", "?c"), ("no_gluten_bread", "?b"),
         ("no_gluten_content", "?c"), ("notprepared", "?s")],
        [("at_kitchen_sandwich", "?s"), ("no_gluten_sandwich", "?s")],
        [("at_kitchen_bread", "?b"), ("at_kitchen_content", "?c"), ("notprepared", "?s")],
    ),
    "make_sandwich": (
        ["?s", "?b", "?c"],
        [("at_kitchen_bread", "?b"), ("at_kitchen_content", "?c"), ("notprepared", "?s")],
        [("at_kitchen_sandwich", "?s")],
        [("at_kitchen_bread", "?b"), ("at_kitchen_content", "?c"), ("notprepared", "?s")],
    ),
    "put_on_tray": (
        ["?s", "?t", "?k"],
        [("at_kitchen_sandwich", "?s"), ("at", "?t", "?k")],
        [("on", "?s", "?t")],
        [("at_kitchen_sandwich", "?s")],
    ),
    "serve_sandwich_no_gluten": (
        ["?s", "?c", "?t", "?p"],
        [("allergic_gluten", "?c"), ("on", "?s", "?t"), ("waiting", "?c", "?p"),
         ("no_gluten_sandwich", "?s"), ("at", "?t", "?p")],
        [("served", "?c")],
        [("on", "?s", "?t")],
    ),
    "serve_sandwich": (
        ["?s", "?c", "?t", "?p"],
        [("not_allergic_gluten", "?c"), ("waiting", "?c", "?p"), ("on", "?s", "?t"), ("at", "?t", "?p")],
        [("served", "?c")],
        [("on", "?s", "?t")],
    ),
    "move_tray": (
        ["?t", "?p1", "?p2"],
        [("at", "?t", "?p1")],
        [("at", "?t", "?p2")],
        [("at", "?t", "?p1")],
    ),
}

# (children as (allergic, table index)), number of tables, number of trays
CS_INSTANCES = [
    ("p01", [(True, 1), (False, 1)], 1, 1),
    ("p02", [(False, 1), (True, 2), (False, 2)], 2, 1),
    ("p03", [(True, 1), (False, 2)], 2, 2),
    ("p04", [(False, 1), (True, 1)], 1, 2),
    ("p05", [(True, 2), (False, 1), (False, 1)], 2, 1),
    ("p06", [(False, 2), (True, 1)], 2, 1),
    ("p07", [(False, 1), (False, 1), (True, 1)], 1, 2),
    ("p08", [(True, 1), (False, 2), (False, 1)], 2, 2),
    ("p09", [(False, 2), (True, 2)], 2, 1),
]
CS_TRAIN = ["p01", "p02", "p03"]


class Childsnack:
    def __init__(self, name, kids, tables, trays):
        self.name = name
        n = len(kids)
        self.children = [f"child{i + 1}" for i in range(n)]
        self.allergic = {c for c, (a, _) in zip(self.children, kids) if a}
        self.table = {c: f"table{t}" for c, (_, t) in zip(self.children, kids)}
        self.tables = [f"table{t + 1}" for t in range(tables)]
        self.trays = [f"tray{t + 1}" for t in range(trays)]
        self.sandwiches = [f"sandw{i + 1}" for i in range(n)]
        na = len(self.allergic)
        self.ng_bread = [f"bread{i + 1}" for i in range(na)]
        self.gl_bread = [f"bread{i + 1}" for i in range(na, n)]
        self.ng_content = [f"content{i + 1}" for i in range(na)]
        self.gl_content = [f"content{i + 1}" for i in range(na, n)]

    def init(self):
        s = []
        s += [f"at_kitchen_bread {b}" for b in self.ng_bread + self.gl_bread]
        s += [f"at_kitchen_content {c}" for c in self.ng_content + self.gl_content]
        s += [f"no_gluten_bread {b}" for b in self.ng_bread]
        s += [f"no_gluten_content {c}" for c in self.ng_content]
        s += [f"at {t} kitchen" for t in self.trays]
        for c in self.children:
            s.append(f"{'allergic_gluten' if c in self.allergic else 'not_allergic_gluten'} {c}")
            s.append(f"waiting {c} {self.table[c]}")
        s += [f"notprepared {x}" for x in self.sandwiches]
        return s

    def goal(self):
        return [f"served {c}" for c in self.children]

    def pddl(self):
        objects = [
            ("child", self.children),
            ("bread", self.ng_bread + self.gl_bread),
            ("content", self.ng_content + self.gl_content),
            ("sandwich", self.sandwiches),
            ("tray", self.trays),
            ("kitchen", ["kitchen"]),
            ("place", self.tables),
        ]
        return pddl_problem(self.name, "childsnack", objects, self.init(), self.goal())

    def _make(self, allergic, pools, sandw):
        nb, gb, nc, gc = pools
        if allergic:
            return ("make_sandwich_no_gluten", sandw, nb.pop(0), nc.pop(0))
        return ("make_sandwich", sandw, gb.pop(0), gc.pop(0))

    def _serve(self, child, sandw, tray):
        act = "serve_sandwich_no_gluten" if child in self.allergic else "serve_sandwich"
        return (act, sandw, child, tray, self.table[child])

    def batch(self, ng_first):
        """Makes every sandwich, loads one tray, then visits the tables."""
        pools = (list(self.ng_bread), list(self.gl_bread), list(self.ng_content), list(self.gl_content))
        allergic = [c for c in self.children if c in self.allergic]
        others = [c for c in self.children if c not in self.allergic]
        order = allergic + others if ng_first else others + allergic
        plan, owner = [], {}
        for child, sandw in zip(order, self.sandwiches):
            plan.append(self._make(child in self.allergic, pools, sandw))
            owner[child] = sandw
        tray = self.trays[0]
        for sandw in self.sandwiches:
            plan.append(("put_on_tray", sandw, tray, "kitchen"))
        here = "kitchen"
        for table in self.tables:
            kids = [c for c in order if self.table[c] == table]
            if not kids:
                continue
            plan.append(("move_tray", tray, here, table))
            here = table
            for c in kids:
                plan.append(self._serve(c, owner[c], tray))
        return plan

    def greedy(self):
        """Serves one child at a time, allergic children first."""
        pools = (list(self.ng_bread), list(self.gl_bread), list(self.ng_content), list(self.gl_content))
        order = [c for c in self.children if c in self.allergic] + [c for c in self.children if c not in self.allergic]
        tray = self.trays[0]
        plan = []
        for k, (child, sandw) in enumerate(zip(order, self.sandwiches)):
            plan.append(self._make(child in self.allergic, pools, sandw))
            plan.append(("put_on_tray", sandw, tray, "kitchen"))
            plan.append(("move_tray", tray, "kitchen", self.table[child]))
            plan.append(self._serve(child, sandw, tray))
            if k + 1 < len(order):
                plan.append(("move_tray", tray, self.table[child], "kitchen"))
        return plan


def childsnack():
    out = ROOT / "childsnack"
    if out.exists():
        shutil.rmtree(out)
    (out / "instances").mkdir(parents=True)
    (out / "domain.pddl").write_text(CHILDSNACK_DOMAIN)
    for name, kids, tables, trays in CS_INSTANCES:
        inst = Childsnack(name, kids, tables, trays)
        (out / "instances" / f"{name}.pddl").write_text(inst.pddl())
        split = "train" if name in CS_TRAIN else "test"
        for agent, plan in [("gs", inst.greedy()), ("ngf", inst.batch(True)), ("ngl", inst.batch(False))]:
            write_plan(out / "plans" / agent / f"{name}.plan", plan)
            states = simulate(CS_SCHEMAS, inst.init(), plan)
            assert set(inst.goal()) <= states[-1], (agent, name)
            assert 5 <= len(states) <= 15, (agent, name, len(states))
            write_trace(out / "traces" / agent / split / f"{name}.trace.json", name,
                        f"../../../instances/{name}.pddl", states)


# --------------------------------------------------------------- Spanner

SPANNER_DOMAIN = """(define (domain spanner)
  (:requirements :strips :typing)
  (:types location locatable - object
          operator nut spanner - locatable)
  (:predicates
    (at ?m - locatable ?l - location)
    (carrying ?m - operator ?s - spanner)
    (useable ?s - spanner)
    (link ?l1 - location ?l2 - location)
    (tightened ?n - nut)
    (loose ?n - nut))

  (:action walk
    :parameters (?start - location ?end - location ?m - operator)
    :precondition (and (at ?m ?start) (link ?start ?end))
    :effect (and (not (at ?m ?start)) (at ?m ?end)))

  (:action pickup_spanner
    :parameters (?l - location ?s - spanner ?m - operator)
    :precondition (and (at ?m ?l) (at ?s ?l))
    :effect (and (not (at ?s ?l)) (carrying ?m ?s)))

  (:action tighten_nut
    :parameters (?l - location ?s - spanner ?m - operator ?n - nut)
    :precondition (and (at ?m ?l) (at ?n ?l) (carrying ?m ?s) (useable ?s) (loose ?n))
    :effect (and (not (loose ?n)) (not (useable ?s)) (tightened ?n))))
"""

SP_SCHEMAS = {
    "walk": (["?a", "?b", "?m"], [("at", "?m", "?a"), ("link", "?a", "?b")], [("at", "?m", "?b")], [("at", "?m", "?a")]),
    "pickup_spanner": (["?l", "?s", "?m"], [("at", "?m", "?l"), ("at", "?s", "?l")], [("carrying", "?m", "?s")],
                       [("at", "?s", "?l")]),
    "tighten_nut": (
        ["?l", "?s", "?m", "?n"],
        [("at", "?m", "?l"), ("at", "?n", "?l"), ("carrying", "?m", "?s"), ("useable", "?s"), ("loose", "?n")],
        [("tightened", "?n")],
        [("loose", "?n"), ("useable", "?s")],
    ),
}

# spanners per intermediate location, number of nuts
SP_INSTANCES = [
    ("s01", [1, 1, 1], 2),
    ("s02", [2, 0, 1], 1),
    ("s03", [0, 2, 1], 2),
    ("s04", [1, 2], 2),
    ("s05", [1, 0, 1, 1], 2),
    ("s06", [2, 1], 1),
    ("s07", [1, 1, 1, 1], 3),
    ("s08", [0, 1, 2], 2),
    ("s09", [3], 2),
]
SP_TRAIN = ["s01", "s02", "s03"]


class Spanner:
    def __init__(self, name, spanners, nuts):
        self.name = name
        self.locs = ["shed"] + [f"location{i + 1}" for i in range(len(spanners))] + ["gate"]
        self.spanners = {}
        k = 1
        for i, c in enumerate(spanners):
            for _ in range(c):
                self.spanners[f"spanner{k}"] = self.locs[i + 1]
                k += 1
        self.nuts = [f"nut{i + 1}" for i in range(nuts)]
        assert len(self.spanners) > nuts

    def init(self):
        s = ["at bob shed"]
        s += [f"at {sp} {loc}" for sp, loc in self.spanners.items()]
        s += [f"useable {sp}" for sp in self.spanners]
        s += [f"link {a} {b}" for a, b in zip(self.locs, self.locs[1:])]
        s += [f"at {n} gate" for n in self.nuts]
        s += [f"loose {n}" for n in self.nuts]
        return s

    def goal(self):
        return [f"tightened {n}" for n in self.nuts]

    def pddl(self):
        objects = [
            ("operator", ["bob"]),
            ("spanner", list(self.spanners)),
            ("nut", self.nuts),
            ("location", self.locs),
        ]
        return pddl_problem(self.name, "spanner", objects, self.init(), self.goal())

    def run(self, wanted):
        """Walks to the gate picking up to `wanted` spanners, then tightens."""
        plan, carried = [], []
        for here, nxt in zip(self.locs, self.locs[1:]):
            for sp, loc in self.spanners.items():
                if loc == here and len(carried) < wanted:
                    plan.append(("pickup_spanner", here, sp, "bob"))
                    carried.append(sp)
            plan.append(("walk", here, nxt, "bob"))
        for sp, n in zip(carried, self.nuts):
            plan.append(("tighten_nut", "gate", sp, "bob", n))
        return plan


def spanner():
    out = ROOT / "spanner"
    if out.exists():
        shutil.rmtree(out)
    (out / "instances").mkdir(parents=True)
    (out / "domain.pddl").write_text(SPANNER_DOMAIN)
    for name, spanners, nuts in SP_INSTANCES:
        inst = Spanner(name, spanners, nuts)
        (out / "instances" / f"{name}.pddl").write_text(inst.pddl())
        split = "train" if name in SP_TRAIN else "test"
        agents = [("all", len(inst.spanners)), ("sme", len(inst.nuts)), ("sgl", 1)]
        for agent, wanted in agents:
            plan = inst.run(wanted)
            write_plan(out / "plans" / agent / f"{name}.plan", plan)
            states = simulate(SP_SCHEMAS, inst.init(), plan)
            if agent != "sgl":
                assert set(inst.goal()) <= states[-1], (agent, name)
            write_trace(out / "traces" / agent / split / f"{name}.trace.json", name,
                        f"../../../instances/{name}.pddl", states)


if __name__ == "__main__":
    childsnack()
    spanner()

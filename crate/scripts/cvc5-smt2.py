#!/usr/bin/env python3
"""Interactive SMT-LIB v2 front end for the cvc5 Python bindings.

Reads commands from stdin and writes responses to stdout, flushing after each
complete command, so it can be driven like a native `cvc5 --incremental`.
"""
import sys

import cvc5


def balanced(text):
    depth = 0
    in_str = False
    in_bar = False
    comment = False
    seen = False
    for ch in text:
        if comment:
            if ch == "\n":
                comment = False
            continue
        if in_str:
            if ch == '"':
                in_str = False
            continue
        if in_bar:
            if ch == "|":
                in_bar = False
            continue
        if ch == ";":
            comment = True
        elif ch == '"':
            in_str = True
        elif ch == "|":
            in_bar = True
        elif ch == "(":
            depth += 1
            seen = True
        elif ch == ")":
            depth -= 1
    return seen and depth == 0


def main():
    tm = cvc5.TermManager()
    solver = cvc5.Solver(tm)
    solver.setOption("incremental", "true")
    for arg in sys.argv[1:]:
        if arg.startswith("--") and "=" in arg:
            key, val = arg[2:].split("=", 1)
            solver.setOption(key, val)
    sm = cvc5.SymbolManager(tm)
    pending = ""
    for line in sys.stdin:
        pending += line
        if not balanced(pending):
            continue
        parser = cvc5.InputParser(solver, sm)
        parser.setStringInput(cvc5.InputLanguage.SMT_LIB_2_6, pending, "stdin")
        pending = ""
        while True:
            try:
                cmd = parser.nextCommand()
            except Exception as exc:  # parse errors
                msg = str(exc).replace('"', "'").replace("\n", " ")
                sys.stdout.write('(error "%s")\n' % msg)
                break
            if cmd.isNull():
                break
            if cmd.getCommandName() == "exit":
                sys.stdout.flush()
                return
            try:
                out = cmd.invoke(solver, sm)
            except Exception as exc:
                msg = str(exc).replace('"', "'").replace("\n", " ")
                out = '(error "%s")\n' % msg
            if out.startswith("unknown"):
                out = "unknown\n"
            sys.stdout.write(out)
        sys.stdout.flush()


if __name__ == "__main__":
    main()

import pytest

from pimcrypt.controller import (COMMAND_ARRAY_BYTES, Controller,
                                 ControllerError, FunctionDescriptor,
                                 HostAction, Invocation, KernelProgram,
                                 StrideRule, host_action)
from pimcrypt.fabric import Subarray
from pimcrypt.isa import CommandWord, LogicKind


def prog_of(commands, functions, schedule, actions=(), width=256):
    return KernelProgram(name="t", commands=commands, functions=functions,
                         schedule=schedule, host_actions=list(actions),
                         block_width=width)


def test_copy_program():
    cmds = [CommandWord.rd_row(0), CommandWord.wr_row(1)]
    prog = prog_of(cmds, {"Copy": FunctionDescriptor("Copy", 0, 2)},
                   [Invocation("Copy")])
    sub = Subarray()
    sub.write_row(0, 42)
    stats = Controller(prog).run(sub)
    assert sub.read_row(1) == 42
    assert stats.commands == 2 and stats.cycles == 2


def test_stride_rules_walk_rows():
    # copy row i -> row 10+i for i in 0..3 from a single command window
    cmds = [CommandWord.rd_row(0), CommandWord.wr_row(10)]
    fd = FunctionDescriptor("Walk", 0, 2,
                            strides=(StrideRule(0, 1), StrideRule(1, 1)))
    prog = prog_of(cmds, {"Walk": fd}, [Invocation("Walk", 4, 0)])
    sub = Subarray()
    for i in range(4):
        sub.write_row(i, 100 + i)
    Controller(prog).run(sub)
    assert [sub.read_row(10 + i) for i in range(4)] == [100, 101, 102, 103]


def test_iteration_base_offsets_strides():
    cmds = [CommandWord.rd_row(0), CommandWord.wr_row(20)]
    fd = FunctionDescriptor("W", 0, 2, strides=(StrideRule(0, 2),))
    prog = prog_of(cmds, {"W": fd}, [Invocation("W", 1, 3)])
    sub = Subarray()
    sub.write_row(6, 9)
    Controller(prog).run(sub)
    assert sub.read_row(20) == 9


def test_capacity_limit():
    cmds = [CommandWord.rd_row(0)] * (COMMAND_ARRAY_BYTES // 2 + 1)
    with pytest.raises(ControllerError):
        Controller(prog_of(cmds, {"F": FunctionDescriptor("F", 0, len(cmds))},
                           [Invocation("F")]))


def test_published_total_fits_in_command_array():
    # the published program set: 2233 commands = 4466 bytes < 8 KiB
    cmds = [CommandWord.rd_row(0)] * 2233
    prog = prog_of(cmds, {"All": FunctionDescriptor("All", 0, 2233)},
                   [Invocation("All")])
    Controller(prog)   # validates
    assert 2 * len(cmds) == 4466 <= COMMAND_ARRAY_BYTES


def test_undefined_function_rejected():
    cmds = [CommandWord.rd_row(0)]
    with pytest.raises(ControllerError):
        Controller(prog_of(cmds, {"F": FunctionDescriptor("F", 0, 1)},
                           [Invocation("Nope")]))


def test_stride_out_of_range_rejected():
    cmds = [CommandWord.rd_row(120), CommandWord.wr_row(1)]
    fd = FunctionDescriptor("W", 0, 2, strides=(StrideRule(0, 8),))
    with pytest.raises(ControllerError):
        Controller(prog_of(cmds, {"W": fd}, [Invocation("W", 4, 0)]))


def test_host_actions_interleave():
    calls = []

    @host_action("t_probe")
    def _probe(sub, env, tag):
        calls.append((tag, sub.read_row(1)))

    cmds = [CommandWord.rd_row(0), CommandWord.wr_row(1)]
    prog = prog_of(cmds, {"Copy": FunctionDescriptor("Copy", 0, 2)},
                   [Invocation("Copy")],
                   actions=[HostAction(0, "t_probe", {"tag": "before"}),
                            HostAction(1, "t_probe", {"tag": "after"})])
    sub = Subarray()
    sub.write_row(0, 5)
    Controller(prog).run(sub)
    assert calls == [("before", 0), ("after", 5)]


def test_stats_per_function():
    cmds = ([CommandWord.rd_row(0), CommandWord.shift(2),
             CommandWord.wr_row(1)])
    fd = FunctionDescriptor("S", 0, 3)
    prog = prog_of(cmds, {"S": fd}, [Invocation("S", 5, 0)])
    stats = Controller(prog).run(Subarray())
    fs = stats.per_function["S"]
    assert fs.invocations == 1 and fs.iterations == 5
    assert fs.commands == 15 and fs.cycles == 5 * (3 + 2)
    assert stats.commands == 15 and stats.cycles == 25


def test_json_round_trip():
    cmds = [CommandWord.rd_row(0), CommandWord.wr_row(1)]
    prog = prog_of(cmds, {"Copy": FunctionDescriptor(
        "Copy", 0, 2, strides=(StrideRule(1, 1),))},
        [Invocation("Copy", 2, 0)],
        actions=[HostAction(0, "t_noop", {})])
    again = KernelProgram.from_json(prog.to_json())
    assert again.commands == prog.commands
    assert again.functions == prog.functions
    assert again.schedule == prog.schedule
    assert again.host_actions == prog.host_actions

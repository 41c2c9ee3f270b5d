import pytest

from rsl import (
    Category,
    ModelConfig,
    PromptParts,
    TranslationAborted,
    build_prompt,
    check,
    default_shots,
    extract_rsl,
    make_prompt_parts,
    render_program,
    scripted_transport,
    translate,
)
from rsl.diagnostics import render

CONFIG = ModelConfig(base_url="http://offline.invalid", model_name="scripted")
SYSTEM = "You translate tasks into robot programs."


def parts(task="Approach the door.", shots=()):
    return PromptParts(SYSTEM, tuple(shots), task)


def test_zero_shot_prompt_shape():
    messages = build_prompt(parts("Approach the door."))
    assert [m.role for m in messages] == ["system", "user"]
    assert messages[-1].content == "Approach the door."


def test_twelve_shots_give_twenty_six_messages():
    shots = default_shots()
    assert len(shots) == 12
    messages = build_prompt(PromptParts(SYSTEM, shots, "task"))
    assert len(messages) == 1 + 24 + 1
    roles = [m.role for m in messages[1:-1]]
    assert roles == ["user", "assistant"] * 12


def test_shipped_shots_verify():
    for _, rsl_text in default_shots():
        assert not check(rsl_text).diagnostics


def test_default_prompt_parts_modes():
    with_shots = make_prompt_parts("t")
    assert len(with_shots.shots) == 12
    zero = make_prompt_parts("t", zero_shot=True)
    assert zero.shots == ()
    assert "forward" in with_shots.system_message


def test_empty_task_rejected():
    with pytest.raises(ValueError):
        build_prompt(parts(task="  "))


def test_bad_shot_rejected_at_construction():
    with pytest.raises(ValueError, match="does not verify"):
        parts(shots=[("Broken task", "approach table")])


def test_extract_from_fenced_block():
    assert extract_rsl("Here you go:\n```\nforward 1;\n```") == "forward 1;"


def test_extract_from_fence_with_language_tag():
    assert extract_rsl("```rsl\ngoto 1, 2;\nperceive;\n```\nthanks") == "goto 1, 2;\nperceive;"


def test_extract_concatenates_multiple_fences():
    text = "```\nforward 1;\n```\nand then\n```\ngrasp cup;\n```"
    assert extract_rsl(text) == "forward 1;\ngrasp cup;"


def test_extract_keyword_lines_only():
    text = "Sure! forward 1;\nforward 2;\nHope this helps"
    assert extract_rsl(text) == "forward 2;"


def test_extract_keeps_indented_keyword_lines():
    text = "plan:\n  forward 1;\n  turnleft 0.5;\ndone"
    assert extract_rsl(text) == "  forward 1;\n  turnleft 0.5;"


def test_extract_requires_word_boundary():
    # "forwardly" is not a keyword line.
    assert extract_rsl("forwardly 3; nonsense") == "forwardly 3; nonsense"


def test_extract_identity_on_bare_programs():
    assert extract_rsl("forward 1;") == "forward 1;"


def test_extract_passes_junk_through():
    assert extract_rsl("I cannot help with that.") == "I cannot help with that."


def test_translate_first_pass_success():
    transport = scripted_transport(["forward 1;"])
    outcome = translate(parts(), CONFIG, max_passes=5, transport=transport)
    assert outcome.verified
    assert outcome.passes == 1
    assert render_program(outcome.program) == "forward 1;"
    assert [m.role for m in outcome.transcript] == ["system", "user", "assistant"]


def test_translate_repairs_missing_semicolon():
    transport = scripted_transport(["approach table", "approach table;"])
    outcome = translate(parts("Approach the table."), CONFIG, 5, transport=transport)
    assert outcome.verified
    assert outcome.passes == 2
    first_diags = outcome.raw_history[0][1]
    assert [d.category for d in first_diags] == [Category.SEMICOLON]
    # The pass-2 user message carries the rendered diagnostic exactly once.
    feedback = outcome.transcript[-2]
    assert feedback.role == "user"
    assert feedback.content.count(render(first_diags[0])) == 1
    assert "approach table" in feedback.content
    # The transport saw the feedback block as the last message of call 2.
    second_request = transport.requests[1]
    assert second_request[-1]["role"] == "user"
    assert render(first_diags[0]) in second_request[-1]["content"]


def test_translate_exhaustion():
    transport = scripted_transport(["move 1;", "move 1;", "move 1;"])
    outcome = translate(parts(), CONFIG, max_passes=3, transport=transport)
    assert not outcome.verified
    assert outcome.passes == 3
    assert outcome.program is None
    last_diags = outcome.raw_history[-1][1]
    assert [d.category for d in last_diags] == [Category.COMMAND]
    # Exhausted loop sends no dangling feedback.
    assert outcome.transcript[-1].role == "assistant"


def test_feedback_contains_every_previous_diagnostic_once():
    # Three broken statements, all on keyword-led lines so extraction keeps
    # them: wrong arity, missing terminator, non-positive magnitude.
    broken = "goto 2;\napproach table\nforward -1;"
    transport = scripted_transport([broken, "forward 1;"])
    outcome = translate(parts(), CONFIG, 5, transport=transport)
    assert outcome.verified and outcome.passes == 2
    first_diags = outcome.raw_history[0][1]
    assert len(first_diags) == 3
    feedback = outcome.transcript[3].content
    for d in first_diags:
        assert feedback.count(render(d)) == 1


def test_transcript_accumulates_across_passes():
    transport = scripted_transport(["move 1;", "move 2;", "forward 3;"])
    outcome = translate(parts(), CONFIG, 5, transport=transport)
    assert outcome.passes == 3
    roles = [m.role for m in outcome.transcript]
    assert roles == [
        "system", "user",
        "assistant", "user",
        "assistant", "user",
        "assistant",
    ]
    # Each pass saw the full conversation so far.
    assert [len(r) for r in transport.requests] == [2, 4, 6]


def test_shot_count_does_not_change_loop_behavior():
    replies = ["approach table", "approach table;"]
    zero = translate(
        parts("Approach the table."), CONFIG, 5, transport=scripted_transport(replies)
    )
    shot = translate(
        PromptParts(SYSTEM, (("Grasp the cup.", "grasp cup;"),), "Approach the table."),
        CONFIG,
        5,
        transport=scripted_transport(replies),
    )
    assert zero.verified == shot.verified
    assert zero.passes == shot.passes
    assert zero.program == shot.program
    assert [d for _, d in zero.raw_history] == [d for _, d in shot.raw_history]


def test_client_error_annotated_with_pass_number():
    transport = scripted_transport(["move 1;"])  # exhausted on pass 2
    with pytest.raises(TranslationAborted) as info:
        translate(parts(), CONFIG, 5, transport=transport)
    assert info.value.pass_number == 2
    assert "pass 2" in str(info.value)


def test_max_passes_must_be_positive():
    with pytest.raises(ValueError):
        translate(parts(), CONFIG, max_passes=0, transport=scripted_transport(["x"]))


def test_verified_program_recheck_idempotent():
    transport = scripted_transport(["goto 0, 0;\nperceive;"])
    outcome = translate(parts(), CONFIG, 5, transport=transport)
    assert outcome.verified
    assert not check(render_program(outcome.program)).diagnostics

"""Fine-tuning data formats: the "<X> = <Y>" base template and chat triples."""

from __future__ import annotations

from dataclasses import dataclass

from .model import ParallelPair

#: System prompt for instruction-tuned models; fixed, not configurable.
INSTRUCT_SYSTEM_PROMPT = (
    "You are a bilingual speaker of English and Spanish. Translate the "
    "following English sentence into code-switched text between both languages:"
)


@dataclass(frozen=True)
class ChatTriple:
    system: str
    user: str
    assistant: str  # empty at inference

    def __post_init__(self) -> None:
        if not self.system or not self.user:
            raise ValueError("system and user fields must be non-empty")


def format_base(pair: ParallelPair) -> str:
    """English-to-CS training record: ``{en_text} = {cs_text}``.

    Splitting the record on the first " = " recovers en_text exactly;
    cs_text recovery is not guaranteed when cs_text itself contains " = ".
    """
    if not pair.en_text or not pair.cs_text:
        raise ValueError(f"pair {pair.id!r} has an empty side")
    return f"{pair.en_text} = {pair.cs_text}"


def format_base_inference(en_text: str) -> str:
    """Inference-time base record with an empty target: ``{en_text} = ``."""
    if not en_text:
        raise ValueError("en_text must be non-empty")
    return f"{en_text} = "


def format_instruct(pair: ParallelPair) -> ChatTriple:
    """Chat triple for instruction-tuned models."""
    if not pair.en_text or not pair.cs_text:
        raise ValueError(f"pair {pair.id!r} has an empty side")
    return ChatTriple(
        system=INSTRUCT_SYSTEM_PROMPT, user=pair.en_text, assistant=pair.cs_text
    )


def format_instruct_inference(en_text: str) -> ChatTriple:
    """Chat triple with the assistant side left empty for the model to fill."""
    if not en_text:
        raise ValueError("en_text must be non-empty")
    return ChatTriple(system=INSTRUCT_SYSTEM_PROMPT, user=en_text, assistant="")

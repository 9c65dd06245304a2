from app.core.rng import SeededRandomSource
from app.models.field import FieldElement, FieldSpec


def element(spec: FieldSpec, value: int) -> FieldElement:
    return FieldElement(spec, int(value))


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def inv(a: FieldElement) -> FieldElement:
    """Multiplicative inverse; FieldDomainError for zero."""
    return a.inv()


def sample_uniform(spec: FieldSpec, rng: SeededRandomSource) -> FieldElement:
    return FieldElement(spec, int(spec.random((), rng)))

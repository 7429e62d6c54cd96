from .synthetic import RotationFixture, bijective_corpus, random_rotation

__all__ = [
    'RotationFixture',
    'bijective_corpus',
    'random_rotation'
]

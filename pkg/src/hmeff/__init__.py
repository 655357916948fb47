"""An effect-handler calculus with unrestricted let-polymorphism.

Subpackages are plain modules: :mod:`syntax`, :mod:`parser`, :mod:`pretty`,
:mod:`eval`, :mod:`types`, :mod:`infer`, :mod:`dynstate`, :mod:`translate`,
:mod:`harness` and :mod:`cli`.
"""
__version__ = "0.1.0"

import pytest

from kuramoto_pinning import backend


def test_env_forces_python(monkeypatch):
    monkeypatch.setenv(backend.ENV_VAR, "python")
    assert backend.get() is backend.python
    assert backend.name_of(backend.get()) == "python"


def test_auto_prefers_compiled(monkeypatch):
    monkeypatch.delenv(backend.ENV_VAR, raising=False)
    expected = backend.compiled if backend.compiled is not None else backend.python
    assert backend.get() is expected


def test_unknown_backend():
    with pytest.raises(ValueError):
        backend.get("fortran")


def test_compiled_request_without_extension(monkeypatch):
    monkeypatch.setattr(backend, "compiled", None)
    with pytest.raises(ImportError):
        backend.get("cython")
    assert backend.get("auto") is backend.python

def test_import():
    import mandelstam  # noqa: F401

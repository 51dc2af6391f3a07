from importlib.resources import files


def corpus_path(name: str):
    return files("lwrcross") / "scenarios" / f"{name}.cfg"

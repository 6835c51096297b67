"""HTTP service wrapping the core package: pydantic request/response models
(`schemas`), pure handlers (`handlers`), and the FastAPI app (`app`)."""

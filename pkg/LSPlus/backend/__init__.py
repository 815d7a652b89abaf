from .common import BaseStorage, BundleLayout, FileSystem, InMemory

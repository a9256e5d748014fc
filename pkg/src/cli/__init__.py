from .main import build_parser, main
from .render import RenderOptions, TableFormat, emit_table, render_tree

__all__ = ['RenderOptions', 'TableFormat', 'build_parser', 'emit_table', 'main', 'render_tree']

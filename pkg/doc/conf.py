project = "solharm"
author = "solharm developers"
copyright = "2026, solharm developers"

extensions = [
    'sphinx.ext.napoleon',
    'sphinx.ext.mathjax',
    "sphinx_automodapi.automodapi",
    'sphinx_automodapi.smart_resolver',
    'myst_parser'
]

html_title = "solharm"
html_theme = "furo"
html_show_sourcelink = False

napoleon_include_init_with_doc = True
napoleon_use_admonition_for_examples = True
napoleon_use_admonition_for_notes = True

autodoc_class_signature = "separated"
autodoc_default_options = {
    'member-order': 'bysource',
    'class-doc-from': 'class',
    'exclude-members': '__dict__, __weakref__, __module__, __new__',
}

automodsumm_inherited_members = True

myst_enable_extensions = ["dollarmath"]

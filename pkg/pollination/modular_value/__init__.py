from .entry import RecipeEntryPoint


__pollination__ = {
    'entry_point': RecipeEntryPoint,
    'app_version': '0.1.0',
    'config': {
        'docker': {
            'image': 'pollination/modular-value:latest',
            'workdir': '/home/modular-value'
        }
    }
}

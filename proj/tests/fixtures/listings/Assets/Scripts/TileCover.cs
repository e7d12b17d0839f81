using System.Collections.Generic;
using Mapbox.Utils;

namespace Mapbox.Map
{
    public static class TileCover
    {
        public static HashSet<int> Get(Vector2dBounds bounds, int zoom)
        {
            var tiles = new HashSet<int>();
            int count = 1 << (2 * zoom);
            for (int i = 0; i < count; i++)
            {
                tiles.Add(i);
            }
            return tiles;
        }
    }
}
